#pragma once

// End-to-end Monte Carlo measurement of network-coded BER/FER at the
// relay. Each frame: two sources encode independent messages with the same
// code, interleave, map to FSK symbols, and transmit simultaneously; the
// relay demodulates super-symbols, runs the DNC SOMAP and the LDPC
// decoder (BICM: one demodulation then all decoder iterations; BICM-ID:
// one decoder iteration then one SOMAP refresh per global loop), and the
// hard decisions are scored against u1 XOR u2.
//
// Frames are dispatched in fixed-size chunks with per-frame derived seeds,
// so counts are identical for any worker count.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <vector>

#include "bp_decoder.hpp"
#include "channel.hpp"
#include "common.hpp"
#include "demodulator.hpp"
#include "eira_builder.hpp"
#include "modem.hpp"
#include "somap.hpp"

namespace pnc {

enum class FeedbackMode { bicm, bicm_id };

inline FeedbackMode feedback_from_string(const std::string& s) {
    if (s == "bicm") return FeedbackMode::bicm;
    if (s == "bicm-id" || s == "bicm_id") return FeedbackMode::bicm_id;
    throw std::runtime_error("unknown feedback mode \"" + s + "\" (bicm|bicm-id)");
}

inline std::string to_string(FeedbackMode m) {
    return m == FeedbackMode::bicm ? "bicm" : "bicm-id";
}

struct TrialConfig {
    int mod_order = 4;
    CsiMode csi = CsiMode::partial;
    FeedbackMode feedback = FeedbackMode::bicm_id;
    NoiseConvention noise_convention = NoiseConvention::bits_per_symbol;
    PartialSameTone partial_same_tone = PartialSameTone::combined_rician;
    std::vector<double> snr_db;
    long long max_frames = 1000000;
    long long max_frame_errors = 100;
    long long max_bit_errors = 0;  // 0 = no bit-error stop
    int iterations = 100;
    int phase_nodes = kPhaseNodes;
    std::uint64_t master_seed = 1;
    int workers = 0;
};

struct ResultRecord {
    double snr_db = 0.0;
    long long frames = 0;
    long long bit_errors = 0;
    long long frame_errors = 0;
    double ber = 0.0;
    double fer = 0.0;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
};

namespace detail {

inline constexpr long long kFramesPerChunk = 32;

struct FrameOutcome {
    long long bit_errors = 0;
    bool frame_error = false;
};

inline FrameOutcome simulate_frame(const ParityCheckMatrix& h, const Interleaver& il,
                                   const TrialConfig& cfg, double n0, double snr_db,
                                   long long frame_index) {
    const int k = h.info_cols();
    const int n = h.cols();
    const auto snr_key = std::uint64_t(std::llround(snr_db * 1000.0)) + (1ULL << 41);
    Rng rng(derive_seed(cfg.master_seed, snr_key, std::uint64_t(frame_index)));

    std::vector<std::uint8_t> u1(std::size_t(k), 0);
    std::vector<std::uint8_t> u2(std::size_t(k), 0);
    for (auto& b : u1) b = std::uint8_t(rng.raw() & 1);
    for (auto& b : u2) b = std::uint8_t(rng.raw() & 1);
    const auto c1 = encode(u1, h);
    const auto c2 = encode(u2, h);
    const auto b1 = il.interleave<std::uint8_t>(c1.bits);
    const auto b2 = il.interleave<std::uint8_t>(c2.bits);
    const auto q1 = modulate(b1, cfg.mod_order);
    const auto q2 = modulate(b2, cfg.mod_order);
    const auto fading = draw_fading(q1.symbols.size(), rng);
    const auto y = transmit(q1.symbols, q2.symbols, fading, cfg.mod_order, n0, rng);
    const auto csi = make_csi_record(fading, cfg.csi);
    const auto post = super_symbol_likelihoods(y, csi, n0, cfg.phase_nodes, cfg.partial_same_tone);

    BpDecoder dec(h);
    std::vector<double> apriori(std::size_t(n), 0.0);
    auto z = dnc_somap(post, apriori);
    auto z_deint = il.deinterleave<double>(z);

    std::vector<std::uint8_t> hard;
    if (cfg.feedback == FeedbackMode::bicm) {
        hard = dec.decode(z_deint, cfg.iterations, true).hard;
    } else {
        dec.reset(z_deint);
        for (int t = 0; t < cfg.iterations; ++t) {
            dec.iterate();
            hard = BpDecoder::hard_decisions(dec.posterior());
            if (h.syndrome_ok(hard)) break;
            if (t + 1 == cfg.iterations) break;
            const auto v = il.interleave<double>(dec.extrinsic());
            z = dnc_somap(post, v);
            z_deint = il.deinterleave<double>(z);
            dec.set_channel_llrs(z_deint);
        }
    }

    FrameOutcome out;
    for (int i = 0; i < k; ++i)
        out.bit_errors += (hard[std::size_t(i)] != (u1[std::size_t(i)] ^ u2[std::size_t(i)]));
    out.frame_error = out.bit_errors > 0;
    return out;
}

}  // namespace detail

inline ResultRecord run_point(const ParityCheckMatrix& h, const TrialConfig& cfg,
                              double snr_db) {
    if (cfg.max_frames < 1) throw std::invalid_argument("run_point: max_frames must be >= 1");
    if (cfg.iterations < 1) throw std::invalid_argument("run_point: iterations must be >= 1");
    const double rate = double(h.info_cols()) / double(h.cols());
    const double n0 = noise_density(snr_db, rate, cfg.mod_order, cfg.noise_convention);
    const Interleaver il =
        Interleaver::random(std::size_t(h.cols()), derive_seed(cfg.master_seed, 0x317e));

    const auto t0 = std::chrono::steady_clock::now();
    ResultRecord rec;
    rec.snr_db = snr_db;
    rec.seed = cfg.master_seed;

    long long next_frame = 0;
    while (true) {
        const long long chunk =
            std::min(detail::kFramesPerChunk, cfg.max_frames - next_frame);
        if (chunk <= 0) break;
        std::vector<detail::FrameOutcome> outcomes{};
        outcomes.resize(std::size_t(chunk));
        parallel_for(std::size_t(chunk), cfg.workers, [&](std::size_t i) {
            outcomes[i] =
                detail::simulate_frame(h, il, cfg, n0, snr_db, next_frame + (long long)i);
        });
        for (const auto& o : outcomes) {
            rec.bit_errors += o.bit_errors;
            rec.frame_errors += o.frame_error ? 1 : 0;
        }
        next_frame += chunk;
        rec.frames = next_frame;
        if (cfg.max_bit_errors > 0 && rec.bit_errors >= cfg.max_bit_errors) break;
        if (cfg.max_frame_errors > 0 && rec.frame_errors >= cfg.max_frame_errors) break;
    }

    rec.ber = double(rec.bit_errors) / (double(rec.frames) * double(h.info_cols()));
    rec.fer = double(rec.frame_errors) / double(rec.frames);
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

inline std::vector<ResultRecord> run_sweep(const ParityCheckMatrix& h, const TrialConfig& cfg) {
    if (cfg.snr_db.empty()) throw std::invalid_argument("run_sweep: empty SNR list");
    std::vector<ResultRecord> out;
    out.reserve(cfg.snr_db.size());
    for (double snr : cfg.snr_db) out.push_back(run_point(h, cfg, snr));
    return out;
}

}  // namespace pnc
