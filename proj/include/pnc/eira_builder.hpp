#pragma once

// Random realization of an eIRA parity-check matrix from a degree
// distribution, and the matching back-substitution systematic encoder.
//
// Construction: the N-K smallest degrees (all >= 2) are assigned to the
// parity columns. Each parity column carries the accumulator dual diagonal;
// degrees above 2 are met with extra sub-diagonal entries so the matrix
// stays lower-triangular in H2 and therefore encodable in one pass. The
// last parity column is the accumulator terminator and realizes weight 1,
// one short of its assigned degree-2 slot; the freed check socket is
// handed to one information column, so every row ends at weight d_c and
// the realized edge total equals d_c (N-K) exactly. The column census thus
// matches the distribution except for those two boundary columns.

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "common.hpp"
#include "degree_distribution.hpp"
#include "parity_check_matrix.hpp"

namespace pnc {

namespace detail {

// Column pairs sharing two rows inside H1 form length-4 cycles; cheap to
// suppress at WiMAX scale, skipped at DVB-S2 scale.
inline constexpr int kGirthRepairMaxCols = 4096;
inline constexpr int kRepairPassCap = 100;

}  // namespace detail

inline ParityCheckMatrix realize_matrix(const DegreeDistribution& v, std::uint64_t seed) {
    const auto report = validate_distribution(v);
    if (!report.valid())
        throw std::invalid_argument("realize_matrix: distribution fails validation (" +
                                    v.label() + ")");

    const int n = int(v.block_length);
    const int k = int(v.info_length);
    const int r = n - k;
    const int dc = v.check_degree;
    Rng rng(seed);

    // Expand to one degree per node and split: smallest degrees >= 2 fill
    // the parity columns, everything else (including any degree-1 nodes)
    // goes to H1.
    std::vector<int> degrees;
    degrees.reserve(std::size_t(n));
    for (const auto& e : v.entries)
        degrees.insert(degrees.end(), std::size_t(e.count), e.degree);
    std::sort(degrees.begin(), degrees.end());

    std::vector<int> parity_deg, info_deg;
    parity_deg.reserve(std::size_t(r));
    info_deg.reserve(std::size_t(k));
    for (int d : degrees) {
        if (d >= 2 && int(parity_deg.size()) < r)
            parity_deg.push_back(d);
        else
            info_deg.push_back(d);
    }
    if (int(parity_deg.size()) != r)
        throw std::invalid_argument(
            "realize_matrix: fewer than N-K nodes of degree >= 2; accumulator "
            "sub-distribution inconsistent with dual-diagonal H2");

    std::vector<std::pair<int, int>> entries;
    entries.reserve(std::size_t(v.check_edge_total()));
    std::vector<int> h2_row_weight(std::size_t(r), 0);

    // H2: dual diagonal first. Largest assigned degrees sit on the earliest
    // columns so their extra entries always find room below the diagonal;
    // the terminator column (weight 1) takes the smallest.
    std::sort(parity_deg.rbegin(), parity_deg.rend());
    std::vector<std::set<int>> h2_extra{};
    h2_extra.resize(std::size_t(r));
    for (int c = 0; c < r; ++c) {
        entries.emplace_back(c, k + c);
        ++h2_row_weight[std::size_t(c)];
        if (c + 1 < r) {
            entries.emplace_back(c + 1, k + c);
            ++h2_row_weight[std::size_t(c + 1)];
        }
        const int extra = (c + 1 < r) ? parity_deg[std::size_t(c)] - 2 : 0;  // terminator stays weight 1
        for (int added = 0; added < extra;) {
            const int lo = c + 2;
            if (lo >= r)
                throw std::invalid_argument(
                    "realize_matrix: parity degree too large for accumulator tail");
            const int row = lo + int(rng.below(std::uint64_t(r - lo)));
            if (h2_row_weight[std::size_t(row)] >= dc - 1) continue;  // keep room for H1
            if (!h2_extra[std::size_t(c)].insert(row).second) continue;
            entries.emplace_back(row, k + c);
            ++h2_row_weight[std::size_t(row)];
            ++added;
        }
    }

    // H1 socket construction. Row socket counts top up every row to d_c;
    // the terminator deficit leaves exactly one surplus socket, which is
    // claimed by the last (largest-degree) information column.
    std::vector<int> sockets;
    for (int row = 0; row < r; ++row) {
        const int s = dc - h2_row_weight[std::size_t(row)];
        if (s < 0)
            throw std::invalid_argument("realize_matrix: row over-filled by H2");
        sockets.insert(sockets.end(), std::size_t(s), row);
    }
    std::sort(info_deg.begin(), info_deg.end());
    std::vector<int> stubs;
    for (int c = 0; c < k; ++c)
        stubs.insert(stubs.end(), std::size_t(info_deg[std::size_t(c)]), c);
    if (static_cast<long long>(sockets.size()) != static_cast<long long>(stubs.size()) + 1)
        throw std::invalid_argument("realize_matrix: socket/stub imbalance");
    stubs.push_back(k - 1);

    rng.shuffle(sockets.begin(), sockets.end());

    // Bounded repair of duplicate (row, col) pairings by random socket swaps.
    auto edge_key = [](int row, int col) { return (long long)row * (1LL << 32) | (unsigned)col; };
    const std::size_t m = stubs.size();
    for (int pass = 0; pass <= detail::kRepairPassCap; ++pass) {
        std::set<long long> seen;
        std::vector<std::size_t> bad;
        for (std::size_t i = 0; i < m; ++i)
            if (!seen.insert(edge_key(sockets[i], stubs[i])).second) bad.push_back(i);
        if (bad.empty()) break;
        if (pass == detail::kRepairPassCap)
            throw std::runtime_error(
                "realize_matrix: could not remove duplicate edges; distribution too skewed");
        for (std::size_t i : bad)
            std::swap(sockets[i], sockets[rng.below(m)]);
    }

    // Best-effort suppression of 4-cycles inside H1 at small block lengths.
    if (n <= detail::kGirthRepairMaxCols) {
        for (int pass = 0; pass < detail::kRepairPassCap; ++pass) {
            std::vector<std::vector<int>> col_rows{};
            col_rows.resize(std::size_t(k));
            for (std::size_t i = 0; i < m; ++i)
                col_rows[std::size_t(stubs[i])].push_back(sockets[i]);
            std::set<long long> pair_seen;
            std::vector<std::size_t> bad;
            std::vector<std::vector<std::size_t>> col_edges{};
            col_edges.resize(std::size_t(k));
            for (std::size_t i = 0; i < m; ++i) col_edges[std::size_t(stubs[i])].push_back(i);
            for (int c = 0; c < k; ++c) {
                auto& rows = col_rows[std::size_t(c)];
                std::sort(rows.begin(), rows.end());
                for (std::size_t a = 0; a + 1 < rows.size(); ++a)
                    for (std::size_t b = a + 1; b < rows.size(); ++b)
                        if (!pair_seen.insert(edge_key(rows[a], rows[b])).second)
                            bad.push_back(col_edges[std::size_t(c)][b]);
            }
            if (bad.empty()) break;
            for (std::size_t i : bad) std::swap(sockets[i], sockets[rng.below(m)]);
            // A swap can reintroduce duplicates; clear them before rescanning.
            std::set<long long> seen;
            bool dup = false;
            for (std::size_t i = 0; i < m; ++i)
                if (!seen.insert(edge_key(sockets[i], stubs[i])).second) {
                    std::swap(sockets[i], sockets[rng.below(m)]);
                    dup = true;
                }
            if (dup) continue;
        }
        // Residual duplicates after the girth passes are still fatal.
        std::set<long long> seen;
        for (int pass = 0; pass <= detail::kRepairPassCap; ++pass) {
            seen.clear();
            std::vector<std::size_t> bad;
            for (std::size_t i = 0; i < m; ++i)
                if (!seen.insert(edge_key(sockets[i], stubs[i])).second) bad.push_back(i);
            if (bad.empty()) break;
            if (pass == detail::kRepairPassCap)
                throw std::runtime_error("realize_matrix: duplicate edges after girth repair");
            for (std::size_t i : bad) std::swap(sockets[i], sockets[rng.below(m)]);
        }
    }

    for (std::size_t i = 0; i < m; ++i) entries.emplace_back(sockets[i], stubs[i]);
    return ParityCheckMatrix(r, n, k, std::move(entries));
}

struct Codeword {
    std::vector<std::uint8_t> bits;  // [u | p], length N
    int info_length = 0;
};

// Systematic eIRA encoding: accumulate H1 u through the lower-triangular
// parity block.
inline Codeword encode(std::span<const std::uint8_t> info, const ParityCheckMatrix& h) {
    if (int(info.size()) != h.info_cols())
        throw std::invalid_argument("encode: info length mismatch");
    if (!h.eira_encodable())
        throw std::invalid_argument("encode: matrix is not eIRA back-substitution encodable");
    const int r = h.rows(), k = h.info_cols();
    std::vector<std::uint8_t> parity(std::size_t(r), 0);
    std::vector<std::uint8_t> s(std::size_t(r), 0);
    for (int c = 0; c < k; ++c) {
        if (!info[std::size_t(c)]) continue;
        for (int row : h.col(c)) s[std::size_t(row)] ^= 1;
    }
    for (int row = 0; row < r; ++row) {
        unsigned acc = s[std::size_t(row)];
        for (int c : h.row(row)) {
            if (c < k) continue;
            const int pc = c - k;
            if (pc < row) acc ^= parity[std::size_t(pc)];
        }
        parity[std::size_t(row)] = std::uint8_t(acc & 1u);
    }
    Codeword cw;
    cw.info_length = k;
    cw.bits.assign(info.begin(), info.end());
    cw.bits.insert(cw.bits.end(), parity.begin(), parity.end());
    return cw;
}

}  // namespace pnc
