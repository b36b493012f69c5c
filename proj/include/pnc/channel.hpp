#pragma once

// Two-source multiple-access channel: per-symbol Rayleigh flat fading,
// circularly symmetric complex Gaussian noise, and the Eb/N0 -> N0 map.

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"

namespace pnc {

enum class CsiMode { full, partial, none };

inline std::string to_string(CsiMode m) {
    switch (m) {
        case CsiMode::full: return "full";
        case CsiMode::partial: return "partial";
        case CsiMode::none: return "none";
    }
    return "?";
}

inline CsiMode csi_from_string(const std::string& s) {
    if (s == "full") return CsiMode::full;
    if (s == "partial") return CsiMode::partial;
    if (s == "none") return CsiMode::none;
    throw std::runtime_error("unknown csi mode \"" + s + "\" (full|partial|none)");
}

// N0 = 1 / (10^{X/10} R M). The alternate convention divides by bits per
// symbol log2(M) instead of M.
enum class NoiseConvention { mod_order, bits_per_symbol };

inline NoiseConvention noise_convention_from_string(const std::string& s) {
    if (s == "m") return NoiseConvention::mod_order;
    if (s == "log2m") return NoiseConvention::bits_per_symbol;
    throw std::runtime_error("unknown n0 convention \"" + s + "\" (m|log2m)");
}

inline std::string to_string(NoiseConvention c) {
    return c == NoiseConvention::mod_order ? "m" : "log2m";
}

inline double noise_density(double ebn0_db, double rate, int mod_order,
                            NoiseConvention convention = NoiseConvention::mod_order) {
    if (rate <= 0.0 || rate > 1.0) throw std::invalid_argument("noise_density: rate must be in (0,1]");
    if (mod_order < 1) throw std::invalid_argument("noise_density: mod_order must be positive");
    double m = double(mod_order);
    if (convention == NoiseConvention::bits_per_symbol)
        m = std::log2(double(mod_order));
    if (m <= 0.0) throw std::invalid_argument("noise_density: log2(M) must be positive");
    return 1.0 / (std::pow(10.0, ebn0_db / 10.0) * rate * m);
}

struct SnrSpec {
    double ebn0_db = 0.0;
    double rate = 1.0;
    int mod_order = 2;
    NoiseConvention convention = NoiseConvention::bits_per_symbol;

    double n0() const { return noise_density(ebn0_db, rate, mod_order, convention); }
};

// h_{k,i} = alpha e^{j theta}: alpha Rayleigh with E[alpha^2] = 1, theta
// uniform on [0, 2pi), independent across symbols and sources.
struct FadingFrame {
    std::vector<std::complex<double>> gain1, gain2;

    std::size_t size() const { return gain1.size(); }
};

inline std::complex<double> draw_rayleigh_gain(Rng& rng) {
    const double amp = std::sqrt(-std::log(rng.uniform_pos()));  // sigma = sqrt(1/2)
    const double phase = 2.0 * M_PI * rng.uniform01();
    return std::polar(amp, phase);
}

inline FadingFrame draw_fading(std::size_t n_symbols, Rng& rng) {
    FadingFrame f;
    f.gain1.resize(n_symbols);
    f.gain2.resize(n_symbols);
    for (std::size_t k = 0; k < n_symbols; ++k) f.gain1[k] = draw_rayleigh_gain(rng);
    for (std::size_t k = 0; k < n_symbols; ++k) f.gain2[k] = draw_rayleigh_gain(rng);
    return f;
}

// What the channel hands the receiver, filtered by the configured CSI case:
// full exposes the complex gains, partial only the amplitudes, none nothing.
struct CsiRecord {
    CsiMode mode = CsiMode::none;
    std::vector<std::complex<double>> gains1, gains2;  // full only
    std::vector<double> amps1, amps2;                  // full and partial
};

inline CsiRecord make_csi_record(const FadingFrame& fading, CsiMode mode) {
    CsiRecord rec;
    rec.mode = mode;
    if (mode == CsiMode::full) {
        rec.gains1 = fading.gain1;
        rec.gains2 = fading.gain2;
    }
    if (mode == CsiMode::full || mode == CsiMode::partial) {
        rec.amps1.resize(fading.size());
        rec.amps2.resize(fading.size());
        for (std::size_t k = 0; k < fading.size(); ++k) {
            rec.amps1[k] = std::abs(fading.gain1[k]);
            rec.amps2[k] = std::abs(fading.gain2[k]);
        }
    }
    return rec;
}

// Y column k = h_{k,1} e_{q1} + h_{k,2} e_{q2} + n_k, column-major M x Nq.
struct ObservationFrame {
    int mod_order = 0;
    std::size_t n_symbols = 0;
    std::vector<std::complex<double>> data;

    std::span<const std::complex<double>> column(std::size_t k) const {
        return {data.data() + k * std::size_t(mod_order), std::size_t(mod_order)};
    }
    std::span<std::complex<double>> column(std::size_t k) {
        return {data.data() + k * std::size_t(mod_order), std::size_t(mod_order)};
    }
};

inline ObservationFrame transmit(std::span<const int> symbols1, std::span<const int> symbols2,
                                 const FadingFrame& fading, int mod_order, double n0, Rng& rng) {
    if (symbols1.size() != symbols2.size() || symbols1.size() != fading.size())
        throw std::invalid_argument("transmit: frame length mismatch");
    ObservationFrame y;
    y.mod_order = mod_order;
    y.n_symbols = symbols1.size();
    y.data.resize(y.n_symbols * std::size_t(mod_order));
    for (std::size_t k = 0; k < y.n_symbols; ++k) {
        auto col = y.column(k);
        for (int m = 0; m < mod_order; ++m) col[std::size_t(m)] = rng.gauss_complex(n0);
        const int q1 = symbols1[k], q2 = symbols2[k];
        if (q1 < 0 || q1 >= mod_order || q2 < 0 || q2 >= mod_order)
            throw std::invalid_argument("transmit: symbol index out of range");
        col[std::size_t(q1)] += fading.gain1[k];
        col[std::size_t(q2)] += fading.gain2[k];
    }
    return y;
}

}  // namespace pnc
