#pragma once

// EXIT machinery: Monte Carlo detector characteristic with cubic fit,
// VND/CND transfer curves, tunnel test, threshold grid scan, and the
// degree-distribution search over a base standard.
//
// Curves use B samples at abscissa k/B, k = 0..B-1. The decoding tunnel at
// one SNR is open when the combined detector/VND curve exceeds the CND
// required-input curve by more than eps at every interior grid point.

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "bp_decoder.hpp"
#include "channel.hpp"
#include "common.hpp"
#include "degree_distribution.hpp"
#include "demodulator.hpp"
#include "jfunction.hpp"
#include "modem.hpp"
#include "mutual_information.hpp"
#include "somap.hpp"

namespace pnc {

inline constexpr int kExitGridSize = 100;       // B
inline constexpr double kTunnelEpsilon = 1e-4;  // open-tunnel margin

struct ExitConfig {
    int mod_order = 4;
    CsiMode csi = CsiMode::partial;
    double code_rate = 0.5;  // enters through N0
    NoiseConvention noise_convention = NoiseConvention::bits_per_symbol;
    PartialSameTone partial_same_tone = PartialSameTone::combined_rician;
    int frame_bits = 0;        // L; 0 = use the code block length
    int frames_per_point = 0;  // 0 = auto: 8 below 4096 bits, else 1
    int grid_size = kExitGridSize;
    int phase_nodes = kPhaseNodes;
    std::uint64_t seed = 1;
    int workers = 0;

    int resolved_frames_per_point() const {
        if (frames_per_point > 0) return frames_per_point;
        return frame_bits <= 4096 ? 8 : 1;
    }
};

struct DetectorCharacteristic {
    std::vector<double> apriori_mi;    // k/B
    std::vector<double> extrinsic_mi;  // measured I_E per grid point
    std::array<double, 4> fit{};       // f0..f3
    double fit_rms = 0.0;
    double snr_db = 0.0;
    int mod_order = 0;
    CsiMode csi = CsiMode::none;
    int frame_bits = 0;
    std::uint64_t seed = 0;

    // cubic fit, clamped to [0, 1]
    double evaluate(double x) const {
        const double y = fit[0] + x * (fit[1] + x * (fit[2] + x * fit[3]));
        return y < 0.0 ? 0.0 : (y > 1.0 ? 1.0 : y);
    }
};

struct ExitCurve {
    std::vector<double> abscissa, ordinate;
};

inline std::array<double, 4> fit_cubic(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 4)
        throw std::invalid_argument("fit_cubic: need at least four samples");
    double a[4][5] = {};
    for (std::size_t i = 0; i < x.size(); ++i) {
        double px[7] = {1, 0, 0, 0, 0, 0, 0};
        for (int p = 1; p < 7; ++p) px[p] = px[p - 1] * x[i];
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) a[r][c] += px[r + c];
            a[r][4] += px[r] * y[i];
        }
    }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        for (int c = 0; c < 5; ++c) std::swap(a[col][c], a[pivot][c]);
        if (std::abs(a[col][col]) < 1e-14) throw std::runtime_error("fit_cubic: singular system");
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return {a[0][4] / a[0][0], a[1][4] / a[1][1], a[2][4] / a[2][2], a[3][4] / a[3][3]};
}

// F channel frames are simulated once per SNR and their super-symbol
// likelihoods reused across the whole a-priori grid; each grid point then
// runs one SOMAP pass against synthetic conditionally-Gaussian decoder
// feedback v = (b - 1/2) sigma_k^2 + x sigma_k (no decoder in the loop).
// Sharing the frames keeps adjacent grid samples smooth at B = 100.
// Deterministic in (seed, snr) for any worker count.
inline DetectorCharacteristic measure_detector_characteristic(const ExitConfig& cfg,
                                                              double snr_db) {
    if (cfg.frame_bits <= 0) throw std::invalid_argument("detector characteristic: frame_bits");
    const int mu = bits_per_symbol(cfg.mod_order);
    if (cfg.frame_bits % mu != 0)
        throw std::invalid_argument("detector characteristic: frame_bits not divisible by mu");
    const int b_grid = cfg.grid_size;
    const double n0 =
        noise_density(snr_db, cfg.code_rate, cfg.mod_order, cfg.noise_convention);
    const int frames = cfg.resolved_frames_per_point();
    const std::size_t l = std::size_t(cfg.frame_bits);
    const std::size_t nq = l / std::size_t(mu);
    const auto snr_key = std::uint64_t(std::llround(snr_db * 1000.0)) + (1ULL << 40);

    DetectorCharacteristic det;
    det.apriori_mi.resize(std::size_t(b_grid));
    det.extrinsic_mi.resize(std::size_t(b_grid));
    det.snr_db = snr_db;
    det.mod_order = cfg.mod_order;
    det.csi = cfg.csi;
    det.frame_bits = cfg.frame_bits;
    det.seed = cfg.seed;

    std::vector<SuperSymbolPosterior> posteriors;
    std::vector<std::vector<std::uint8_t>> net_bits;
    posteriors.resize(std::size_t(frames));
    net_bits.resize(std::size_t(frames));
    parallel_for(std::size_t(frames), cfg.workers, [&](std::size_t f) {
        Rng rng(derive_seed(cfg.seed, snr_key, 0x0b5e0000ULL, f));
        std::vector<std::uint8_t> bits1(l), bits2(l), net(l);
        for (auto& bit : bits1) bit = std::uint8_t(rng.raw() & 1);
        for (auto& bit : bits2) bit = std::uint8_t(rng.raw() & 1);
        for (std::size_t i = 0; i < l; ++i) net[i] = bits1[i] ^ bits2[i];
        const auto q1 = modulate(bits1, cfg.mod_order);
        const auto q2 = modulate(bits2, cfg.mod_order);
        const auto fading = draw_fading(nq, rng);
        const auto y = transmit(q1.symbols, q2.symbols, fading, cfg.mod_order, n0, rng);
        const auto csi = make_csi_record(fading, cfg.csi);
        posteriors[f] = super_symbol_likelihoods(y, csi, n0, cfg.phase_nodes, cfg.partial_same_tone);
        net_bits[f] = std::move(net);
    });

    parallel_for(std::size_t(b_grid), cfg.workers, [&](std::size_t k) {
        const double ia = double(k) / double(b_grid);
        const double sigma = j_inverse(ia);
        MutualInformationAccumulator acc;
        for (int f = 0; f < frames; ++f) {
            Rng rng(derive_seed(cfg.seed, snr_key, k + 0x10000ULL, std::uint64_t(f)));
            const auto& net = net_bits[std::size_t(f)];
            std::vector<double> v(l);
            for (std::size_t i = 0; i < l; ++i)
                v[i] = (double(net[i]) - 0.5) * sigma * sigma + rng.gauss() * sigma;
            const auto z = dnc_somap(posteriors[std::size_t(f)], v);
            acc.add(z, net);
        }
        det.apriori_mi[k] = ia;
        det.extrinsic_mi[k] = acc.value();
    });

    det.fit = fit_cubic(det.apriori_mi, det.extrinsic_mi);
    double ss = 0.0;
    for (std::size_t k = 0; k < det.apriori_mi.size(); ++k) {
        const double r = det.extrinsic_mi[k] - det.evaluate(det.apriori_mi[k]);
        ss += r * r;
    }
    det.fit_rms = std::sqrt(ss / double(det.apriori_mi.size()));
    return det;
}

// Per-degree combined detector/VND transfer:
//   I'_A,DET = J(sqrt(d) J^-1(I_A)),
//   I_E     = J(sqrt((d-1) J^-1(I_A)^2 + J^-1(f_DET(I'_A,DET))^2)).
inline std::vector<double> vnd_degree_curve(int degree, const DetectorCharacteristic& det,
                                            int b_grid = kExitGridSize) {
    std::vector<double> out(std::size_t(b_grid), 0.0);
    const double d = double(degree);
    for (int k = 0; k < b_grid; ++k) {
        const double sigma_a = j_inverse(double(k) / double(b_grid));
        const double det_in = j_function(std::sqrt(d) * sigma_a);
        double fd = det.evaluate(det_in);
        if (fd > kMaxMi) fd = kMaxMi;
        const double sigma_det = j_inverse(fd);
        out[std::size_t(k)] =
            j_function(std::sqrt((d - 1.0) * sigma_a * sigma_a + sigma_det * sigma_det));
    }
    return out;
}

inline ExitCurve vnd_curve(const DegreeDistribution& v, const DetectorCharacteristic& det,
                           int b_grid = kExitGridSize) {
    ExitCurve curve;
    curve.abscissa.resize(std::size_t(b_grid));
    curve.ordinate.assign(std::size_t(b_grid), 0.0);
    for (int k = 0; k < b_grid; ++k) curve.abscissa[std::size_t(k)] = double(k) / double(b_grid);
    const auto fractions = v.edge_fractions();
    for (std::size_t i = 0; i < v.entries.size(); ++i) {
        const auto row = vnd_degree_curve(v.entries[i].degree, det, b_grid);
        for (int k = 0; k < b_grid; ++k)
            curve.ordinate[std::size_t(k)] += fractions[i] * row[std::size_t(k)];
    }
    return curve;
}

// Forward CND transfer I_E(I_A) = 1 - J(sqrt(d_c - 1) J^-1(1 - I_A)).
inline ExitCurve cnd_curve(int check_degree, int b_grid = kExitGridSize) {
    if (check_degree < 2) throw std::invalid_argument("cnd_curve: check degree must be >= 2");
    ExitCurve curve;
    curve.abscissa.resize(std::size_t(b_grid));
    curve.ordinate.resize(std::size_t(b_grid));
    const double root = std::sqrt(double(check_degree - 1));
    for (int k = 0; k < b_grid; ++k) {
        const double ia = double(k) / double(b_grid);
        curve.abscissa[std::size_t(k)] = ia;
        curve.ordinate[std::size_t(k)] = 1.0 - j_function(root * j_inverse(1.0 - ia));
    }
    return curve;
}

// Required-input form on the VND axes: the a-priori MI the CND needs to
// emit I_E = k/B. Inverse of the forward transfer.
inline ExitCurve cnd_apriori_curve(int check_degree, int b_grid = kExitGridSize) {
    if (check_degree < 2) throw std::invalid_argument("cnd_apriori_curve: check degree must be >= 2");
    ExitCurve curve;
    curve.abscissa.resize(std::size_t(b_grid));
    curve.ordinate.resize(std::size_t(b_grid));
    const double root = std::sqrt(double(check_degree - 1));
    for (int k = 0; k < b_grid; ++k) {
        const double ie = double(k) / double(b_grid);
        curve.abscissa[std::size_t(k)] = ie;
        curve.ordinate[std::size_t(k)] = 1.0 - j_function(j_inverse(1.0 - ie) / root);
    }
    return curve;
}

// Interior grid points only; both curve families meet at the endpoints.
inline bool tunnel_open(std::span<const double> vnd, std::span<const double> cnd_required,
                        double eps = kTunnelEpsilon) {
    if (vnd.size() != cnd_required.size() || vnd.size() < 3)
        throw std::invalid_argument("tunnel_open: curve size mismatch");
    for (std::size_t k = 1; k < vnd.size(); ++k)
        if (!(vnd[k] > cnd_required[k] + eps)) return false;
    return true;
}

struct SnrGrid {
    double lo_db = 0.0;
    double hi_db = 0.0;
    double step_db = 0.1;

    std::vector<double> points() const {
        if (step_db <= 0.0 || hi_db < lo_db) throw std::invalid_argument("SnrGrid: bad range");
        const int n = int(std::llround((hi_db - lo_db) / step_db)) + 1;
        std::vector<double> p(std::size_t(n), 0.0);
        for (int i = 0; i < n; ++i) p[std::size_t(i)] = lo_db + step_db * double(i);
        return p;
    }
};

// Measured characteristics per SNR, shared across every distribution
// evaluated under the same config. Single writer, then read-only.
class CharacteristicCache {
public:
    using Source = std::function<DetectorCharacteristic(double)>;

    explicit CharacteristicCache(Source source) : source_(std::move(source)) {}

    static CharacteristicCache measured(const ExitConfig& cfg) {
        return CharacteristicCache(
            [cfg](double snr_db) { return measure_detector_characteristic(cfg, snr_db); });
    }

    const DetectorCharacteristic& at(double snr_db) {
        const long long key = std::llround(snr_db * 1000.0);
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, source_(snr_db)).first;
        return it->second;
    }

private:
    Source source_;
    std::map<long long, DetectorCharacteristic> cache_;
    std::mutex mutex_;
};

struct ThresholdResult {
    DegreeDistribution distribution;
    bool found = false;
    double threshold_db = 0.0;
    double grid_step = 0.0;
    std::vector<std::pair<double, bool>> verdicts;  // (snr, open) for scanned points
};

// Lowest grid SNR with an open tunnel. The scan walks the grid upward and
// stops at the first open point unless full_scan requests every verdict.
inline ThresholdResult exit_threshold(const DegreeDistribution& v, const SnrGrid& grid,
                                      CharacteristicCache& cache, bool full_scan = false,
                                      int b_grid = kExitGridSize) {
    const auto report = validate_distribution(v);
    if (!report.valid())
        throw std::invalid_argument("exit_threshold: invalid distribution " + v.label());
    ThresholdResult res;
    res.distribution = v;
    res.grid_step = grid.step_db;
    const auto cnd_required = cnd_apriori_curve(v.check_degree, b_grid);
    for (double snr : grid.points()) {
        const auto& det = cache.at(snr);
        const auto vnd = vnd_curve(v, det, b_grid);
        const bool open = tunnel_open(vnd.ordinate, cnd_required.ordinate);
        res.verdicts.emplace_back(snr, open);
        if (open && !res.found) {
            res.found = true;
            res.threshold_db = snr;
            if (!full_scan) break;
        }
    }
    return res;
}

struct BaseStandard {
    std::string name;
    long long block_length = 0;
    long long info_length = 0;
    int check_degree = 0;
    std::vector<DegreeEntry> fixed;       // standard-retained columns
    std::vector<DegreeEntry> standard_free;  // rest of the standard code's census
    int free_lo = 0;                      // search range for the free degrees
    int free_hi = 0;

    DegreeDistribution with_free(int deg_a, long long cnt_a, int deg_b, long long cnt_b) const {
        DegreeDistribution v;
        v.entries = fixed;
        v.entries.push_back({deg_a, cnt_a});
        v.entries.push_back({deg_b, cnt_b});
        v.check_degree = check_degree;
        v.block_length = block_length;
        v.info_length = info_length;
        return v;
    }

    // The unmodified standard code's degree distribution.
    DegreeDistribution standard_distribution() const {
        DegreeDistribution v;
        v.entries = fixed;
        v.entries.insert(v.entries.end(), standard_free.begin(), standard_free.end());
        v.check_degree = check_degree;
        v.block_length = block_length;
        v.info_length = info_length;
        return v;
    }
};

inline const BaseStandard& dvbs2_base() {
    static const BaseStandard base{
        "dvbs2", 64800, 38880, 11, {{2, 25920}}, {{3, 25920}, {12, 12960}}, 3, 100};
    return base;
}

inline const BaseStandard& wimax_base() {
    static const BaseStandard base{
        "wimax", 2304, 1536, 10, {{2, 672}, {3, 96}}, {{3, 1056}, {6, 480}}, 1, 100};
    return base;
}

inline const BaseStandard& base_standard(const std::string& name) {
    if (name == "dvbs2") return dvbs2_base();
    if (name == "wimax") return wimax_base();
    throw std::runtime_error("unknown base standard \"" + name + "\" (dvbs2|wimax)");
}

// All feasible two-free-degree distributions of a base standard.
inline std::vector<DegreeDistribution> enumerate_feasible(const BaseStandard& base) {
    std::vector<DegreeDistribution> out;
    for (int da = base.free_lo; da <= base.free_hi; ++da)
        for (int db = da + 1; db <= base.free_hi; ++db) {
            const auto sol = solve_free_counts(base.fixed, da, db, base.block_length,
                                               base.info_length, base.check_degree);
            if (!sol.feasible) continue;
            auto v = base.with_free(da, sol.count_a, db, sol.count_b);
            if (validate_distribution(v).valid()) out.push_back(std::move(v));
        }
    return out;
}

// Threshold search over the feasible set, sharing one characteristic per
// grid SNR and one per-degree VND row cache per characteristic. Results
// sorted ascending by threshold, ties broken by the sorted degree list;
// distributions without an open tunnel in range sort last.
inline std::vector<ThresholdResult> optimize_degrees(const BaseStandard& base,
                                                     const SnrGrid& grid,
                                                     CharacteristicCache& cache,
                                                     int b_grid = kExitGridSize) {
    const auto candidates = enumerate_feasible(base);
    if (candidates.empty()) throw std::runtime_error("optimize_degrees: empty feasible set");
    std::vector<ThresholdResult> results(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        results[i].distribution = candidates[i];
        results[i].grid_step = grid.step_db;
    }
    const auto cnd_required = cnd_apriori_curve(base.check_degree, b_grid);
    std::size_t unresolved = candidates.size();
    for (double snr : grid.points()) {
        if (unresolved == 0) break;
        const auto& det = cache.at(snr);
        std::map<int, std::vector<double>> degree_rows;
        auto row_for = [&](int degree) -> const std::vector<double>& {
            auto it = degree_rows.find(degree);
            if (it == degree_rows.end())
                it = degree_rows.emplace(degree, vnd_degree_curve(degree, det, b_grid)).first;
            return it->second;
        };
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (results[i].found) continue;
            const auto& v = candidates[i];
            const auto fractions = v.edge_fractions();
            std::vector<double> vnd(std::size_t(b_grid), 0.0);
            for (std::size_t e = 0; e < v.entries.size(); ++e) {
                const auto& row = row_for(v.entries[e].degree);
                for (int k = 0; k < b_grid; ++k)
                    vnd[std::size_t(k)] += fractions[e] * row[std::size_t(k)];
            }
            const bool open = tunnel_open(vnd, cnd_required.ordinate);
            results[i].verdicts.emplace_back(snr, open);
            if (open) {
                results[i].found = true;
                results[i].threshold_db = snr;
                --unresolved;
            }
        }
    }
    std::sort(results.begin(), results.end(), [](const ThresholdResult& a, const ThresholdResult& b) {
        if (a.found != b.found) return a.found;
        if (a.found && a.threshold_db != b.threshold_db) return a.threshold_db < b.threshold_db;
        return a.distribution.canonical_key() < b.distribution.canonical_key();
    });
    return results;
}

}  // namespace pnc
