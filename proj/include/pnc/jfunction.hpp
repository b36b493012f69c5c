#pragma once

// J-function: mutual information between a bit and its consistent Gaussian
// LLR (mean sigma^2/2, variance sigma^2).
//
// j_quadrature is the reference evaluation by adaptive Simpson integration
// (|error| < 1e-10). j_function serves the same values through a monotone
// cubic table built once from the quadrature (agreement within 1e-8,
// checked by tests) so the EXIT search can afford millions of calls.
// j_inverse brackets on the monotone table to 1e-8.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "common.hpp"

namespace pnc {

inline constexpr double kMaxMi = 1.0 - 1e-9;  // J_inv clamp per contract

namespace detail {

// integrand of 1 - J at standard-normal coordinate t, with the exact
// sigma-derivative for Hermite table construction
struct JIntegrand {
    double sigma;

    double value(double t) const {
        const double l = 0.5 * sigma * sigma + sigma * t;
        const double phi = std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
        return phi * max_star0(-l) / M_LN2;
    }

    double dvalue(double t) const {
        const double l = 0.5 * sigma * sigma + sigma * t;
        const double phi = std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
        const double logistic = 1.0 / (1.0 + std::exp(l));  // d/dl ln(1+e^-l) = -logistic(-l)
        return -phi * (sigma + t) * logistic / M_LN2;
    }
};

template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 48);
}

struct JTable {
    static constexpr double kSigmaMax = 16.0;
    static constexpr int kNodes = 4097;
    std::vector<double> value, slope;
    double h;

    JTable();

    double eval(double sigma) const {
        if (sigma <= 0.0) return 0.0;
        if (sigma >= kSigmaMax) return value.back();
        const double u = sigma / h;
        std::size_t i = std::size_t(u);
        if (i >= value.size() - 1) i = value.size() - 2;
        const double t = u - double(i);
        const double y0 = value[i], y1 = value[i + 1];
        const double m0 = slope[i] * h, m1 = slope[i + 1] * h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
               (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
    }

    static const JTable& instance() {
        static const JTable table;
        return table;
    }
};

}  // namespace detail

// Reference evaluation, adaptive quadrature.
inline double j_quadrature(double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("j_quadrature: sigma must be >= 0");
    if (sigma == 0.0) return 0.0;
    if (sigma > 60.0) return 1.0;
    detail::JIntegrand g{sigma};
    const double loss =
        detail::integrate([&g](double t) { return g.value(t); }, -12.0, 12.0, 1e-12);
    const double j = 1.0 - loss;
    return j < 0.0 ? 0.0 : (j > 1.0 ? 1.0 : j);
}

inline detail::JTable::JTable() {
    value.resize(kNodes);
    slope.resize(kNodes);
    h = kSigmaMax / double(kNodes - 1);
    for (int i = 0; i < kNodes; ++i) {
        const double sigma = h * double(i);
        detail::JIntegrand g{sigma};
        value[std::size_t(i)] = j_quadrature(sigma);
        slope[std::size_t(i)] =
            sigma == 0.0
                ? 0.0
                : -detail::integrate([&g](double t) { return g.dvalue(t); }, -12.0, 12.0, 1e-12);
    }
    // Fritsch-Carlson limiter keeps the interpolant monotone even where a
    // slope slightly overshoots its secants.
    for (int i = 0; i + 1 < kNodes; ++i) {
        const double d = (value[std::size_t(i) + 1] - value[std::size_t(i)]) / h;
        if (d <= 0.0) continue;
        for (int j : {i, i + 1}) {
            double& m = slope[std::size_t(j)];
            if (m < 0.0) m = 0.0;
            if (m > 3.0 * d) m = 3.0 * d;
        }
    }
}

// Fast path; |j_function - j_quadrature| < 1e-8 over the whole range.
inline double j_function(double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("j_function: sigma must be >= 0");
    return detail::JTable::instance().eval(sigma);
}

// Bracketed bisection on the monotone table, |sigma error| < 1e-8.
inline double j_inverse(double mi) {
    if (mi < 0.0 || mi >= 1.0) {
        if (mi < 0.0) throw std::invalid_argument("j_inverse: mi must be in [0, 1)");
        mi = kMaxMi;
    }
    if (mi > kMaxMi) mi = kMaxMi;
    if (mi <= 0.0) return 0.0;
    const auto& table = detail::JTable::instance();
    double lo = 0.0, hi = detail::JTable::kSigmaMax;
    if (table.eval(hi) <= mi) return hi;
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (table.eval(mid) < mi)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace pnc
