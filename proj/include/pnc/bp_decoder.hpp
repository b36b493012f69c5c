#pragma once

// Flooding-schedule sum-product decoder over the Tanner graph. Check
// updates use the exact pairwise soft-XOR (Jacobian form of the ln-tanh
// rule); all messages are clamped to +/- kLlrClamp. Extrinsic output is
// posterior minus channel input. LLR convention: positive favors bit 1.

#include <cstdint>
#include <span>
#include <vector>

#include "common.hpp"
#include "parity_check_matrix.hpp"

namespace pnc {

// LLR of a XOR b from the LLRs of a and b.
inline double soft_xor(double a, double b) {
    return max_star(a, b) - max_star(0.0, a + b);
}

class BpDecoder {
public:
    explicit BpDecoder(const ParityCheckMatrix& h) : h_(&h) {
        const int rows = h.rows();
        check_edge_begin_.reserve(std::size_t(rows) + 1);
        check_edge_begin_.push_back(0);
        for (int r = 0; r < rows; ++r) {
            for (int c : h.row(r)) edge_var_.push_back(c);
            check_edge_begin_.push_back(int(edge_var_.size()));
        }
        var_edges_.resize(std::size_t(h.cols()));
        for (std::size_t e = 0; e < edge_var_.size(); ++e)
            var_edges_[std::size_t(edge_var_[e])].push_back(int(e));
        var_to_check_.resize(edge_var_.size());
        check_to_var_.resize(edge_var_.size());
        channel_.resize(std::size_t(h.cols()));
    }

    // Fresh decode: clears messages and installs the channel LLRs.
    void reset(std::span<const double> channel_llrs) {
        set_channel_llrs(channel_llrs);
        std::fill(check_to_var_.begin(), check_to_var_.end(), 0.0);
        iterations_done_ = 0;
    }

    // Replaces the channel input while keeping message state (demodulator
    // feedback refresh between global iterations).
    void set_channel_llrs(std::span<const double> channel_llrs) {
        if (channel_llrs.size() != channel_.size())
            throw std::invalid_argument("decoder: channel LLR length mismatch");
        for (std::size_t i = 0; i < channel_.size(); ++i)
            channel_[i] = clamp_llr(channel_llrs[i]);
    }

    // One flooding iteration: all variable updates, then all check updates.
    void iterate() {
        const int cols = h_->cols();
        for (int v = 0; v < cols; ++v) {
            double total = channel_[std::size_t(v)];
            for (int e : var_edges_[std::size_t(v)]) total += check_to_var_[std::size_t(e)];
            for (int e : var_edges_[std::size_t(v)])
                var_to_check_[std::size_t(e)] =
                    clamp_llr(total - check_to_var_[std::size_t(e)]);
        }
        const int rows = h_->rows();
        std::vector<double> prefix, suffix;
        for (int r = 0; r < rows; ++r) {
            const int begin = check_edge_begin_[std::size_t(r)];
            const int end = check_edge_begin_[std::size_t(r) + 1];
            const int deg = end - begin;
            prefix.assign(std::size_t(deg) + 1, 0.0);
            suffix.assign(std::size_t(deg) + 1, 0.0);
            // soft_xor identity element is a bit known to be 0, i.e. -inf
            // under the positive-favors-1 convention; the clamp stands in.
            prefix[0] = -kLlrClamp;
            suffix[std::size_t(deg)] = -kLlrClamp;
            for (int i = 0; i < deg; ++i)
                prefix[std::size_t(i) + 1] =
                    soft_xor(prefix[std::size_t(i)], var_to_check_[std::size_t(begin + i)]);
            for (int i = deg - 1; i >= 0; --i)
                suffix[std::size_t(i)] =
                    soft_xor(suffix[std::size_t(i) + 1], var_to_check_[std::size_t(begin + i)]);
            for (int i = 0; i < deg; ++i)
                check_to_var_[std::size_t(begin + i)] =
                    clamp_llr(soft_xor(prefix[std::size_t(i)], suffix[std::size_t(i) + 1]));
        }
        ++iterations_done_;
    }

    std::vector<double> posterior() const {
        std::vector<double> p(channel_.begin(), channel_.end());
        for (std::size_t e = 0; e < edge_var_.size(); ++e)
            p[std::size_t(edge_var_[e])] += check_to_var_[e];
        return p;
    }

    // Sum of incoming check messages only; invariant to the own channel LLR.
    std::vector<double> extrinsic() const {
        std::vector<double> x(channel_.size(), 0.0);
        for (std::size_t e = 0; e < edge_var_.size(); ++e)
            x[std::size_t(edge_var_[e])] += check_to_var_[e];
        return x;
    }

    static std::vector<std::uint8_t> hard_decisions(std::span<const double> llrs) {
        std::vector<std::uint8_t> bits(llrs.size());
        for (std::size_t i = 0; i < llrs.size(); ++i) bits[i] = llrs[i] > 0.0 ? 1 : 0;
        return bits;
    }

    int iterations_done() const { return iterations_done_; }
    const ParityCheckMatrix& matrix() const { return *h_; }

    struct Result {
        std::vector<double> posterior;
        std::vector<double> extrinsic;
        std::vector<std::uint8_t> hard;
        bool syndrome_ok = false;
        int iterations = 0;
    };

    Result decode(std::span<const double> channel_llrs, int iterations, bool early_exit = true) {
        if (iterations < 1) throw std::invalid_argument("decoder: iterations must be >= 1");
        reset(channel_llrs);
        Result res;
        for (int it = 0; it < iterations; ++it) {
            iterate();
            if (early_exit) {
                auto hard = hard_decisions(posterior());
                if (h_->syndrome_ok(hard)) break;
            }
        }
        res.posterior = posterior();
        res.extrinsic = extrinsic();
        res.hard = hard_decisions(res.posterior);
        res.syndrome_ok = h_->syndrome_ok(res.hard);
        res.iterations = iterations_done_;
        return res;
    }

private:
    const ParityCheckMatrix* h_;
    std::vector<int> edge_var_;          // edge index -> variable, grouped by check
    std::vector<int> check_edge_begin_;  // CSR offsets per check
    std::vector<std::vector<int>> var_edges_;
    std::vector<double> var_to_check_, check_to_var_, channel_;
    int iterations_done_ = 0;
};

}  // namespace pnc
