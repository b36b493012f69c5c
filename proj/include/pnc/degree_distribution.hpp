#pragma once

// Variable-node degree distributions for check-regular eIRA codes:
// validation against the node-sum and edge-balance constraints, and the
// closed-form solve for the two free degree groups of a base standard.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace pnc {

struct DegreeEntry {
    int degree = 0;
    long long count = 0;

    friend bool operator==(const DegreeEntry&, const DegreeEntry&) = default;
};

// V = {d_v,i : o_i} together with the code parameters it must satisfy.
// Duplicate degrees across entries are allowed (distinct groups).
struct DegreeDistribution {
    std::vector<DegreeEntry> entries;
    int check_degree = 0;       // d_c
    long long block_length = 0; // N
    long long info_length = 0;  // K

    long long redundancy() const { return block_length - info_length; }

    long long node_total() const {
        long long s = 0;
        for (const auto& e : entries) s += e.count;
        return s;
    }

    long long variable_edge_total() const {
        long long s = 0;
        for (const auto& e : entries) s += e.count * e.degree;
        return s;
    }

    long long check_edge_total() const {
        return static_cast<long long>(check_degree) * redundancy();
    }

    // Edge fraction b_i carried by each entry, in entry order.
    std::vector<double> edge_fractions() const {
        std::vector<double> b(entries.size());
        const double total = double(variable_edge_total());
        for (std::size_t i = 0; i < entries.size(); ++i)
            b[i] = double(entries[i].count * entries[i].degree) / total;
        return b;
    }

    // Degrees sorted ascending, with counts, as a canonical key for
    // deterministic ordering of search results.
    std::vector<std::pair<int, long long>> canonical_key() const {
        std::vector<std::pair<int, long long>> k;
        k.reserve(entries.size());
        for (const auto& e : entries) k.emplace_back(e.degree, e.count);
        std::sort(k.begin(), k.end());
        return k;
    }

    std::string label() const {
        std::string s = "{";
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (i) s += ", ";
            s += std::to_string(entries[i].degree) + ":" + std::to_string(entries[i].count);
        }
        s += "}";
        return s;
    }
};

struct DistributionReport {
    bool positive_ok = false;     // all degrees and counts >= 1
    bool node_sum_ok = false;     // sum o_i == N
    bool edge_balance_ok = false; // sum o_i d_i == d_c (N - K)
    bool degree_one_present = false; // legal but receives no iterative gain
    long long node_sum = 0;
    long long variable_edges = 0; // e_v
    long long check_edges = 0;    // e_c

    bool valid() const { return positive_ok && node_sum_ok && edge_balance_ok; }
};

inline DistributionReport validate_distribution(const DegreeDistribution& v) {
    DistributionReport r;
    r.positive_ok = !v.entries.empty() && v.check_degree >= 1 &&
                    v.block_length > 0 && v.info_length > 0 &&
                    v.info_length < v.block_length;
    for (const auto& e : v.entries) {
        if (e.degree < 1 || e.count < 1) r.positive_ok = false;
        if (e.degree == 1) r.degree_one_present = true;
    }
    r.node_sum = v.node_total();
    r.variable_edges = v.variable_edge_total();
    r.check_edges = v.check_edge_total();
    r.node_sum_ok = (r.node_sum == v.block_length);
    r.edge_balance_ok = (r.variable_edges == r.check_edges);
    return r;
}

struct FreeCountSolution {
    bool feasible = false;
    long long count_a = 0;
    long long count_b = 0;
};

// Solves { o_a + o_b = N - sum(fixed counts),
//          d_a o_a + d_b o_b = d_c (N-K) - sum(fixed edges) }
// over positive integers. Equal free degrees make the system singular and
// are feasible only in the degenerate consistent case, which collapses to
// a single group and is reported infeasible here.
inline FreeCountSolution solve_free_counts(const std::vector<DegreeEntry>& fixed,
                                           int degree_a, int degree_b,
                                           long long block_length,
                                           long long info_length,
                                           int check_degree) {
    FreeCountSolution s;
    long long fixed_nodes = 0, fixed_edges = 0;
    for (const auto& e : fixed) {
        fixed_nodes += e.count;
        fixed_edges += e.count * e.degree;
    }
    const long long free_nodes = block_length - fixed_nodes;
    const long long free_edges =
        static_cast<long long>(check_degree) * (block_length - info_length) - fixed_edges;
    if (degree_a == degree_b) return s;
    const long long num = free_edges - static_cast<long long>(degree_a) * free_nodes;
    const long long den = degree_b - degree_a;
    if (num % den != 0) return s;
    const long long ob = num / den;
    const long long oa = free_nodes - ob;
    if (oa < 1 || ob < 1) return s;
    s.feasible = true;
    s.count_a = oa;
    s.count_b = ob;
    return s;
}

// JSON schema: {"entries":[[2,25920],[4,34560],[22,4320]],
//               "dc":11, "n":64800, "k":38880}
inline nlohmann::json distribution_to_json(const DegreeDistribution& v) {
    nlohmann::json j;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : v.entries) j["entries"].push_back({e.degree, e.count});
    j["dc"] = v.check_degree;
    j["n"] = v.block_length;
    j["k"] = v.info_length;
    return j;
}

inline DegreeDistribution distribution_from_json(const nlohmann::json& j) {
    DegreeDistribution v;
    for (const char* key : {"entries", "dc", "n", "k"})
        if (!j.contains(key))
            throw std::runtime_error(std::string("distribution: missing field \"") + key + "\"");
    for (const auto& e : j.at("entries")) {
        if (!e.is_array() || e.size() != 2)
            throw std::runtime_error("distribution: entries must be [degree, count] pairs");
        v.entries.push_back({e.at(0).get<int>(), e.at(1).get<long long>()});
    }
    v.check_degree = j.at("dc").get<int>();
    v.block_length = j.at("n").get<long long>();
    v.info_length = j.at("k").get<long long>();
    return v;
}

}  // namespace pnc
