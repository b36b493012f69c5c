#pragma once

// DNC soft bit-mapping: super-symbol log-likelihoods plus a-priori
// network-bit LLRs in, extrinsic network-bit LLRs out. With natural
// labeling the network symbol is s = q1 XOR q2; the a-priori term for a
// bit's own position is excluded from its marginal (extrinsic contract).
// LLR convention everywhere: positive favors bit 1.

#include <span>
#include <vector>

#include "common.hpp"
#include "demodulator.hpp"
#include "modem.hpp"

namespace pnc {

inline std::vector<double> dnc_somap(const SuperSymbolPosterior& post,
                                     std::span<const double> apriori) {
    const int m = post.mod_order;
    const int mu = bits_per_symbol(m);
    if (apriori.size() != post.n_symbols * std::size_t(mu))
        throw std::invalid_argument("dnc_somap: a-priori length mismatch");

    std::vector<double> extrinsic(apriori.size());
    std::vector<double> ap_total(std::size_t(m), 0.0);  // over network symbols s
    std::vector<double> num(std::size_t(mu), 0.0);
    std::vector<double> den(std::size_t(mu), 0.0);

    for (std::size_t k = 0; k < post.n_symbols; ++k) {
        const auto ll = post.interval(k);
        const auto v = apriori.subspan(k * std::size_t(mu), std::size_t(mu));

        for (int s = 0; s < m; ++s) {
            double t = 0.0;
            for (int b = 0; b < mu; ++b)
                if (symbol_bit(s, b, mu)) t += v[std::size_t(b)];
            ap_total[std::size_t(s)] = t;
        }

        std::fill(num.begin(), num.end(), -1e300);
        std::fill(den.begin(), den.end(), -1e300);
        for (int q1 = 0; q1 < m; ++q1)
            for (int q2 = 0; q2 < m; ++q2) {
                const int s = q1 ^ q2;
                const double base = ll[std::size_t(q1 * m + q2)] + ap_total[std::size_t(s)];
                for (int b = 0; b < mu; ++b) {
                    const int bit = symbol_bit(s, b, mu);
                    // strip this position's own a-priori contribution
                    const double val = base - (bit ? v[std::size_t(b)] : 0.0);
                    auto& acc = bit ? num[std::size_t(b)] : den[std::size_t(b)];
                    acc = max_star(acc, val);
                }
            }

        for (int b = 0; b < mu; ++b)
            extrinsic[k * std::size_t(mu) + std::size_t(b)] =
                clamp_llr(num[std::size_t(b)] - den[std::size_t(b)]);
    }
    return extrinsic;
}

}  // namespace pnc
