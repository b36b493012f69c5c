#pragma once

// Simulated mutual information between LLRs and their bits:
//   I = 1 - (1 / (L ln 2)) sum_l max*(0, z[l] (-1)^{b[l]})
// with max*(0, x) = ln(1 + e^x). Result clamped to [0, 1].

#include <cstdint>
#include <span>
#include <stdexcept>

#include "common.hpp"

namespace pnc {

inline double measure_mutual_information(std::span<const double> llrs,
                                         std::span<const std::uint8_t> bits) {
    if (llrs.empty()) throw std::invalid_argument("measure_mutual_information: empty input");
    if (llrs.size() != bits.size())
        throw std::invalid_argument("measure_mutual_information: length mismatch");
    double loss = 0.0;
    for (std::size_t i = 0; i < llrs.size(); ++i)
        loss += max_star0(bits[i] ? -llrs[i] : llrs[i]);
    const double mi = 1.0 - loss / (double(llrs.size()) * M_LN2);
    return mi < 0.0 ? 0.0 : (mi > 1.0 ? 1.0 : mi);
}

// Streaming form for multi-frame averaging.
struct MutualInformationAccumulator {
    double loss = 0.0;
    std::size_t count = 0;

    void add(std::span<const double> llrs, std::span<const std::uint8_t> bits) {
        if (llrs.size() != bits.size())
            throw std::invalid_argument("mi accumulator: length mismatch");
        for (std::size_t i = 0; i < llrs.size(); ++i)
            loss += max_star0(bits[i] ? -llrs[i] : llrs[i]);
        count += llrs.size();
    }

    double value() const {
        if (count == 0) throw std::invalid_argument("mi accumulator: empty");
        const double mi = 1.0 - loss / (double(count) * M_LN2);
        return mi < 0.0 ? 0.0 : (mi > 1.0 ? 1.0 : mi);
    }
};

}  // namespace pnc
