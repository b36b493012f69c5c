#pragma once

// Shared numeric utilities: seeded portable RNG, log-domain helpers,
// deterministic parallel dispatch, and config hashing.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace pnc {

// LLR magnitudes are clamped here throughout the receiver chain so that
// max* recursions never see infinities.
inline constexpr double kLlrClamp = 50.0;

inline double clamp_llr(double x) {
    if (x > kLlrClamp) return kLlrClamp;
    if (x < -kLlrClamp) return -kLlrClamp;
    return x;
}

// max*(a, b) = ln(e^a + e^b), the Jacobian logarithm.
inline double max_star(double a, double b) {
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

// ln(1 + e^x), evaluated without overflow for any x.
inline double max_star0(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

inline double log_sum_exp(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("log_sum_exp: empty input");
    double m = xs[0];
    for (double x : xs)
        if (x > m) m = x;
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stable seed derivation for independent substreams (frame index, grid
// index, ...). Mixing is order-sensitive.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = splitmix64(master ^ 0x6a09e667f3bcc909ULL);
    s = splitmix64(s ^ a);
    s = splitmix64(s ^ (b + 0x1f83d9abfb41bd6bULL));
    s = splitmix64(s ^ (c + 0x5be0cd19137e2179ULL));
    return s;
}

// mt19937_64 output is standardized; the distributions below avoid
// std::*_distribution so streams are bit-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1], safe as a log() argument.
    double uniform_pos() { return double((gen_() >> 11) + 1) * 0x1.0p-53; }

    // Uniform integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below(0)");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % n;
    }

    // Standard normal via Box-Muller; second value cached.
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double t = 2.0 * M_PI * uniform01();
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    std::complex<double> gauss_complex(double variance) {
        const double s = std::sqrt(variance / 2.0);
        return {s * gauss(), s * gauss()};
    }

    template <class It>
    void shuffle(It first, It last) {
        const auto n = std::uint64_t(last - first);
        for (std::uint64_t i = n; i > 1; --i)
            std::swap(first[i - 1], first[below(i)]);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

// Runs fn(i) for i in [0, n). Work is split into fixed index ranges so
// results that depend only on i are identical for any worker count.
inline void parallel_for(std::size_t n, int workers,
                         const std::function<void(std::size_t)>& fn) {
    const int w = std::min<std::size_t>(std::size_t(resolve_workers(workers)), n ? n : 1);
    if (w <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(w));
    for (int t = 0; t < w; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = std::size_t(t); i < n; i += std::size_t(w)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hash_hex(std::string_view data) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(data);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[std::size_t(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace pnc
