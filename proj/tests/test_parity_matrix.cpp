#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <map>

#include "pnc/eira_builder.hpp"
#include "pnc/parity_check_matrix.hpp"

using namespace pnc;

namespace {

const DegreeDistribution kV13{{{2, 672}, {3, 96}, {3, 1296}, {9, 240}}, 10, 2304, 1536};
const DegreeDistribution kV1{{{2, 25920}, {4, 34560}, {22, 4320}}, 11, 64800, 38880};

// Weight census straight off the entry lists, independent of the builder's
// own bookkeeping. The realized census may differ from the declared
// distribution in at most two columns by one: the accumulator terminator
// (one edge short) and the information column that absorbs its socket.
void check_census(const ParityCheckMatrix& h, const DegreeDistribution& v) {
    std::map<int, long long> declared;
    for (const auto& e : v.entries) declared[e.degree] += e.count;
    std::map<int, long long> actual = h.column_weight_census();

    long long edges = 0;
    for (const auto& [w, n] : actual) edges += w * n;
    CHECK(edges == v.check_edge_total());

    // signed per-weight difference, then total column moves
    std::map<int, long long> diff;
    for (const auto& [w, n] : declared) diff[w] += n;
    for (const auto& [w, n] : actual) diff[w] -= n;
    long long moved_up = 0, moved_down = 0;
    for (const auto& [w, d] : diff) {
        if (d > 0) moved_up += d;
        if (d < 0) moved_down -= d;
    }
    CHECK(moved_up == moved_down);
    CHECK(moved_up <= 2);

    for (const auto& [w, n] : h.row_weight_census()) {
        CHECK(w >= v.check_degree - 1);
        CHECK(w <= v.check_degree + 1);
        (void)n;
    }
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

ParityCheckMatrix handmade_4x8() {
    // H1 columns: {0,2}, {1}, {0,1,2,3}, {3}; H2 dual diagonal
    std::vector<std::pair<int, int>> e = {{0, 0}, {2, 0}, {1, 1}, {0, 2}, {1, 2},
                                          {2, 2}, {3, 2}, {3, 3}, {0, 4}, {1, 4},
                                          {1, 5}, {2, 5}, {2, 6}, {3, 6}, {3, 7}};
    return ParityCheckMatrix(4, 8, 4, std::move(e));
}

}  // namespace

TEST_CASE("realized V13 matrix passes the weight census at WiMAX scale") {
    const auto h = realize_matrix(kV13, 1);
    CHECK(h.rows() == 768);
    CHECK(h.cols() == 2304);
    check_census(h, kV13);
    // every row exactly d_c once the terminator socket is rebalanced
    const auto rows = h.row_weight_census();
    REQUIRE(rows.size() == 1);
    CHECK(rows.begin()->first == 10);
    // parity part: the standard-retained 672 weight-2 and 96 weight-3
    // columns, with the terminator one short
    std::map<int, long long> parity_census;
    for (int c = h.info_cols(); c < h.cols(); ++c)
        ++parity_census[int(h.col(c).size())];
    CHECK(parity_census[1] == 1);
    CHECK(parity_census[2] == 671);
    CHECK(parity_census[3] == 96);
    CHECK(h.eira_encodable());
}

TEST_CASE("realized V1 matrix passes the weight census at DVB-S2 scale") {
    const auto h = realize_matrix(kV1, 7);
    CHECK(h.rows() == 25920);
    CHECK(h.cols() == 64800);
    check_census(h, kV1);
    CHECK(h.eira_encodable());
}

TEST_CASE("sampled feasible distributions all pass the weight census") {
    // property sweep over the search space the optimizer draws from
    const std::vector<DegreeEntry> fixed = {{2, 672}, {3, 96}};
    int tested = 0;
    for (int da = 1; da <= 20 && tested < 6; ++da)
        for (int db = da + 3; db <= 40 && tested < 6; db += 7) {
            const auto s = solve_free_counts(fixed, da, db, 2304, 1536, 10);
            if (!s.feasible) continue;
            DegreeDistribution v{{{2, 672}, {3, 96}, {da, s.count_a}, {db, s.count_b}},
                                 10, 2304, 1536};
            if (!validate_distribution(v).valid()) continue;
            CAPTURE(v.label());
            check_census(realize_matrix(v, 77), v);
            ++tested;
        }
    CHECK(tested >= 3);
}

TEST_CASE("degree-1 variable nodes are permitted in H1") {
    const DegreeDistribution v{{{2, 672}, {3, 96}, {1, 408}, {5, 1128}}, 10, 2304, 1536};
    REQUIRE(validate_distribution(v).valid());
    const auto h = realize_matrix(v, 4);
    check_census(h, v);
    // degree-1 columns live in the information part
    long long ones = 0;
    for (int c = 0; c < h.info_cols(); ++c) ones += (h.col(c).size() == 1);
    CHECK(ones >= 407);  // one H1 column may have absorbed the terminator socket
}

TEST_CASE("too few degree-2-or-higher nodes for the accumulator is an error") {
    // valid edge bookkeeping, but only 767 of the 768 parity columns can
    // take a dual-diagonal slot
    const DegreeDistribution v{{{1, 1537}, {8, 760}, {9, 7}}, 10, 2304, 1536};
    REQUIRE(validate_distribution(v).valid());
    CHECK_THROWS_AS((void)realize_matrix(v, 1), std::invalid_argument);
}

TEST_CASE("degree-0 entry is rejected") {
    DegreeDistribution bad{{{0, 672}, {3, 1632}}, 10, 2304, 1536};
    CHECK_THROWS_AS((void)realize_matrix(bad, 1), std::invalid_argument);
}

TEST_CASE("same distribution and seed realize identical matrices") {
    const auto a = realize_matrix(kV13, 42);
    const auto b = realize_matrix(kV13, 42);
    CHECK(a == b);
    const auto c = realize_matrix(kV13, 43);
    CHECK_FALSE(a == c);
}

TEST_CASE("encode: all-zero message maps to the all-zero codeword") {
    const auto h = realize_matrix(kV13, 1);
    std::vector<std::uint8_t> u(std::size_t(h.info_cols()), 0);
    const auto cw = encode(u, h);
    for (auto b : cw.bits) CHECK(b == 0);
    CHECK(h.syndrome_ok(cw.bits));
}

TEST_CASE("encode: hand-computed parity on the 4x8 eIRA matrix") {
    const auto h = handmade_4x8();
    // u = e0 selects H1 column 0 = (1,0,1,0); parity is its cumulative XOR
    const auto cw = encode(std::vector<std::uint8_t>{1, 0, 0, 0}, h);
    CHECK(cw.bits == std::vector<std::uint8_t>{1, 0, 0, 0, 1, 1, 0, 0});
    CHECK(h.syndrome_ok(cw.bits));
    // u = e2 selects column 2 = (1,1,1,1): prefix XOR 1,0,1,0
    const auto cw2 = encode(std::vector<std::uint8_t>{0, 0, 1, 0}, h);
    CHECK(cw2.bits == std::vector<std::uint8_t>{0, 0, 1, 0, 1, 0, 1, 0});
    CHECK(h.syndrome_ok(cw2.bits));
}

TEST_CASE("encode: 1000 random messages all satisfy the syndrome") {
    const auto h = realize_matrix(kV13, 5);
    Rng rng(99);
    std::vector<std::uint8_t> u(std::size_t(h.info_cols()));
    for (int trial = 0; trial < 1000; ++trial) {
        for (auto& b : u) b = std::uint8_t(rng.raw() & 1);
        const auto cw = encode(u, h);
        REQUIRE(h.syndrome_ok(cw.bits));
        for (int i = 0; i < h.info_cols(); ++i)
            REQUIRE(cw.bits[std::size_t(i)] == u[std::size_t(i)]);  // systematic prefix
    }
}

TEST_CASE("encode rejects a non-eIRA matrix") {
    // identity-free parity part: diagonal missing on purpose
    std::vector<std::pair<int, int>> e = {{0, 0}, {1, 1}, {0, 2}, {1, 3}};
    ParityCheckMatrix h(2, 4, 2, std::move(e));
    CHECK_FALSE(h.eira_encodable());
    CHECK_THROWS_AS((void)encode(std::vector<std::uint8_t>{1, 0}, h), std::invalid_argument);
}

TEST_CASE("alist round trip preserves the entry set") {
    const auto h = realize_matrix(kV13, 3);
    const auto path = temp_path("pnc_roundtrip.alist");
    save_alist(h, path);
    const auto back = load_alist(path, h.info_cols());
    CHECK(back == h);
    std::remove(path.c_str());
}

TEST_CASE("alist: malformed and inconsistent files are rejected") {
    const auto path = temp_path("pnc_bad2.alist");
    {
        std::ofstream f(path);
        f << "2 2\n1 1\n1 1\n1 1\n0\n2\n1\n2\n";  // column list references row 0
    }
    CHECK_THROWS(load_alist(path));
    {
        std::ofstream f(path);
        f << "2 2\n1 1\n1 1\n2 0\n1\n";  // truncated
    }
    CHECK_THROWS(load_alist(path));
    {
        std::ofstream f(path);
        // weights say one entry per column/row but row lists disagree
        f << "2 2\n1 1\n1 1\n1 1\n1\n2\n2\n1\n";
    }
    CHECK_THROWS(load_alist(path));
    std::remove(path.c_str());
}

TEST_CASE("DVB-S2 rate-3/5 scale fixture: save, load, census, encode") {
    // standard-census distribution at full DVB-S2 scale, used as the alist
    // fixture stand-in
    const DegreeDistribution dvb_std{{{2, 25920}, {3, 25920}, {12, 12960}}, 11, 64800, 38880};
    const auto h = realize_matrix(dvb_std, 2024);
    const auto path = temp_path("pnc_dvbs2_35.alist");
    save_alist(h, path);
    const auto loaded = load_alist(path);
    CHECK(loaded.cols() == 64800);
    CHECK(loaded.rows() == 25920);
    CHECK(loaded.info_cols() == 38880);
    const auto rows = loaded.row_weight_census();
    REQUIRE(rows.size() == 1);
    CHECK(rows.begin()->first == 11);  // d_c census
    CHECK(loaded == h);
    Rng rng(3);
    std::vector<std::uint8_t> u(std::size_t(loaded.info_cols()));
    for (int t = 0; t < 3; ++t) {
        for (auto& b : u) b = std::uint8_t(rng.raw() & 1);
        CHECK(loaded.syndrome_ok(encode(u, loaded).bits));
    }
    std::remove(path.c_str());
}

TEST_CASE("syndrome_check flags single-bit flips") {
    const auto h = realize_matrix(kV13, 9);
    Rng rng(7);
    std::vector<std::uint8_t> u(std::size_t(h.info_cols()));
    for (auto& b : u) b = std::uint8_t(rng.raw() & 1);
    auto cw = encode(u, h);
    CHECK(syndrome_check(cw.bits, h));
    cw.bits[100] ^= 1;
    CHECK_FALSE(syndrome_check(cw.bits, h));
    std::vector<std::uint8_t> zero(std::size_t(h.cols()), 0);
    CHECK(syndrome_check(zero, h));
}
