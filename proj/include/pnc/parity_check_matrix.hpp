#pragma once

// Sparse binary parity-check matrix with an explicit [H1 | H2] column
// partition, weight census helpers, and alist text I/O.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace pnc {

class ParityCheckMatrix {
public:
    ParityCheckMatrix() = default;

    // entries: (row, col) pairs, 0-indexed, duplicates rejected.
    ParityCheckMatrix(int rows, int cols, int info_cols,
                      std::vector<std::pair<int, int>> entries)
        : rows_(rows), cols_(cols), info_cols_(info_cols) {
        if (rows <= 0 || cols <= 0 || info_cols <= 0 || info_cols >= cols)
            throw std::invalid_argument("ParityCheckMatrix: bad dimensions");
        if (cols - info_cols != rows)
            throw std::invalid_argument("ParityCheckMatrix: parity block must be square");
        row_cols_.assign(std::size_t(rows), {});
        col_rows_.assign(std::size_t(cols), {});
        for (auto [r, c] : entries) {
            if (r < 0 || r >= rows || c < 0 || c >= cols)
                throw std::invalid_argument("ParityCheckMatrix: entry out of range");
            row_cols_[std::size_t(r)].push_back(c);
            col_rows_[std::size_t(c)].push_back(r);
        }
        for (auto& v : row_cols_) {
            std::sort(v.begin(), v.end());
            if (std::adjacent_find(v.begin(), v.end()) != v.end())
                throw std::invalid_argument("ParityCheckMatrix: duplicate entry");
        }
        for (auto& v : col_rows_) std::sort(v.begin(), v.end());
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int info_cols() const { return info_cols_; }   // K: width of H1
    int parity_cols() const { return rows_; }      // width of H2

    const std::vector<int>& row(int r) const { return row_cols_[std::size_t(r)]; }
    const std::vector<int>& col(int c) const { return col_rows_[std::size_t(c)]; }

    long long edge_count() const {
        long long n = 0;
        for (const auto& r : row_cols_) n += (long long)r.size();
        return n;
    }

    std::map<int, long long> column_weight_census() const {
        std::map<int, long long> census;
        for (const auto& c : col_rows_) ++census[int(c.size())];
        return census;
    }

    std::map<int, long long> row_weight_census() const {
        std::map<int, long long> census;
        for (const auto& r : row_cols_) ++census[int(r.size())];
        return census;
    }

    bool has_entry(int r, int c) const {
        const auto& v = row_cols_[std::size_t(r)];
        return std::binary_search(v.begin(), v.end(), c);
    }

    // H2 contains the accumulator dual diagonal and nothing above it.
    // Extra sub-diagonal entries (used when the retained standard part
    // carries weight-3 parity columns) keep back-substitution encoding.
    bool eira_encodable() const {
        for (int c = 0; c < parity_cols(); ++c) {
            const auto& rows_of = col_rows_[std::size_t(info_cols_ + c)];
            if (rows_of.empty() || rows_of.front() != c) return false;  // diagonal
            if (c + 1 < parity_cols() &&
                !std::binary_search(rows_of.begin(), rows_of.end(), c + 1))
                return false;  // sub-diagonal
        }
        return true;
    }

    bool syndrome_ok(std::span<const std::uint8_t> bits) const {
        if (int(bits.size()) != cols_)
            throw std::invalid_argument("syndrome: length mismatch");
        for (const auto& r : row_cols_) {
            unsigned parity = 0;
            for (int c : r) parity ^= bits[std::size_t(c)];
            if (parity & 1u) return false;
        }
        return true;
    }

    friend bool operator==(const ParityCheckMatrix& a, const ParityCheckMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
               a.info_cols_ == b.info_cols_ && a.row_cols_ == b.row_cols_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    int info_cols_ = 0;
    std::vector<std::vector<int>> row_cols_;
    std::vector<std::vector<int>> col_rows_;
};

inline bool syndrome_check(std::span<const std::uint8_t> bits, const ParityCheckMatrix& h) {
    return h.syndrome_ok(bits);
}

// alist text format, 1-indexed: "N M", max column/row degree, per-column
// weights, per-row weights, column adjacency lists, row adjacency lists.
// Zero padding in adjacency lists (fixed-width variant) is accepted on read.
inline void save_alist(const ParityCheckMatrix& h, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_alist: cannot open " + path);
    const int n = h.cols(), m = h.rows();
    int max_col = 0, max_row = 0;
    for (int c = 0; c < n; ++c) max_col = std::max(max_col, int(h.col(c).size()));
    for (int r = 0; r < m; ++r) max_row = std::max(max_row, int(h.row(r).size()));
    f << n << ' ' << m << '\n' << max_col << ' ' << max_row << '\n';
    for (int c = 0; c < n; ++c) f << h.col(c).size() << (c + 1 < n ? ' ' : '\n');
    for (int r = 0; r < m; ++r) f << h.row(r).size() << (r + 1 < m ? ' ' : '\n');
    for (int c = 0; c < n; ++c) {
        const auto& rows = h.col(c);
        for (std::size_t i = 0; i < rows.size(); ++i)
            f << rows[i] + 1 << (i + 1 < rows.size() ? ' ' : '\n');
        if (rows.empty()) f << '\n';
    }
    for (int r = 0; r < m; ++r) {
        const auto& cols = h.row(r);
        for (std::size_t i = 0; i < cols.size(); ++i)
            f << cols[i] + 1 << (i + 1 < cols.size() ? ' ' : '\n');
        if (cols.empty()) f << '\n';
    }
    if (!f) throw std::runtime_error("save_alist: write failed for " + path);
}

// info_cols: column count of H1; alist itself carries no partition, so the
// caller supplies it (default: N - M, the eIRA convention).
inline ParityCheckMatrix load_alist(const std::string& path, int info_cols = -1) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_alist: cannot open " + path);
    auto next_int = [&f, &path](long long lo, long long hi) {
        long long v;
        if (!(f >> v)) throw std::runtime_error("load_alist: truncated file " + path);
        if (v < lo || v > hi)
            throw std::runtime_error("load_alist: value out of range in " + path);
        return v;
    };
    const int n = int(next_int(1, 1 << 28));
    const int m = int(next_int(1, 1 << 28));
    const int max_col = int(next_int(0, m));
    const int max_row = int(next_int(0, n));
    std::vector<int> col_w(std::size_t(n), 0);
    std::vector<int> row_w(std::size_t(m), 0);
    for (auto& w : col_w) w = int(next_int(0, max_col));
    for (auto& w : row_w) w = int(next_int(0, max_row));

    std::vector<std::pair<int, int>> entries;
    long long expected = 0;
    for (int w : col_w) expected += w;
    long long row_total = 0;
    for (int w : row_w) row_total += w;
    if (expected != row_total)
        throw std::runtime_error("load_alist: column/row weight totals disagree in " + path);
    entries.reserve(std::size_t(expected));

    // Column lists are authoritative; entries are rebuilt from them.
    for (int c = 0; c < n; ++c) {
        int seen = 0;
        for (int i = 0; i < std::max(col_w[std::size_t(c)], 0); ++i) {
            const long long v = next_int(1, m);  // 1-indexed; 0 only valid as padding
            entries.emplace_back(int(v - 1), c);
            ++seen;
        }
        for (int i = col_w[std::size_t(c)]; i < max_col && f.peek() != EOF; ++i) {
            // optional fixed-width padding zeros
            std::streampos pos = f.tellg();
            long long v;
            if (!(f >> v)) break;
            if (v != 0) {
                f.seekg(pos);
                break;
            }
        }
        if (seen != col_w[std::size_t(c)])
            throw std::runtime_error("load_alist: column list shorter than declared");
    }
    // Row lists: consumed and cross-checked against the rebuilt matrix.
    std::vector<std::vector<int>> row_lists;
    row_lists.resize(std::size_t(m));
    for (int r = 0; r < m; ++r) {
        for (int i = 0; i < row_w[std::size_t(r)]; ++i)
            row_lists[std::size_t(r)].push_back(int(next_int(1, n)) - 1);
        for (int i = row_w[std::size_t(r)]; i < max_row && f.peek() != EOF; ++i) {
            std::streampos pos = f.tellg();
            long long v;
            if (!(f >> v)) break;
            if (v != 0) {
                f.seekg(pos);
                break;
            }
        }
    }
    const int k = info_cols < 0 ? n - m : info_cols;
    ParityCheckMatrix h(m, n, k, std::move(entries));
    for (int r = 0; r < m; ++r) {
        auto cols = row_lists[std::size_t(r)];
        std::sort(cols.begin(), cols.end());
        if (cols != h.row(r))
            throw std::runtime_error("load_alist: row list inconsistent with column lists");
    }
    return h;
}

}  // namespace pnc
