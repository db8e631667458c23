#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "lsd/codes.hpp"
#include "lsd/error.hpp"
#include "oracles.hpp"

using lsd::CssCode;
using lsd::Index;
using lsd::SparseBinaryMatrix;

namespace {

const std::filesystem::path fixtures = LSD_FIXTURES;

oracle::Dense product_transpose(const SparseBinaryMatrix& a, const SparseBinaryMatrix& b) {
    const auto da = a.to_dense(), db = b.to_dense();
    oracle::Dense out(da.size(), std::vector<std::uint8_t>(db.size()));
    for (std::size_t i = 0; i < da.size(); ++i) {
        for (std::size_t j = 0; j < db.size(); ++j) {
            std::uint8_t acc = 0;
            for (std::size_t q = 0; q < da[i].size(); ++q) acc ^= da[i][q] & db[j][q];
            out[i][j] = acc;
        }
    }
    return out;
}

bool is_zero(const oracle::Dense& m) {
    for (const auto& r : m) {
        for (auto b : r) {
            if (b) return false;
        }
    }
    return true;
}

oracle::Dense stack(oracle::Dense a, const oracle::Dense& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// Everything a CssCode promises, recomputed densely.
void check_css(const CssCode& c) {
    CAPTURE(c.name);
    REQUIRE(c.hx.cols() == c.n);
    REQUIRE(c.hz.cols() == c.n);
    CHECK(is_zero(product_transpose(c.hx, c.hz)));
    const std::size_t rx = oracle::rank(c.hx.to_dense()), rz = oracle::rank(c.hz.to_dense());
    CHECK(c.k == c.n - rx - rz);
    CHECK(c.logicals_x.rows() == c.k);
    CHECK(c.logicals_z.rows() == c.k);
    CHECK(is_zero(product_transpose(c.logicals_x, c.hz)));
    CHECK(is_zero(product_transpose(c.logicals_z, c.hx)));
    CHECK(oracle::rank(stack(c.hx.to_dense(), c.logicals_x.to_dense())) == rx + c.k);
    CHECK(oracle::rank(stack(c.hz.to_dense(), c.logicals_z.to_dense())) == rz + c.k);
    // Logical pairs are non-degenerate: lx·lzᵀ has full rank.
    if (c.k > 0) CHECK(oracle::rank(product_transpose(c.logicals_x, c.logicals_z)) == c.k);
}

lsd::ErrorCode error_of(auto&& f) {
    try {
        f();
    } catch (const lsd::Error& e) {
        return e.code();
    }
    return lsd::ErrorCode{};
}

}  // namespace

TEST_CASE("d=3 surface code dimensions") {
    const auto c = lsd::surface_code(3);
    CHECK(c.n == 9);
    CHECK(c.hx.rows() == 4);
    CHECK(c.hz.rows() == 4);
    CHECK(c.k == 1);
    check_css(c);
}

TEST_CASE("surface codes satisfy the CSS invariants for many distances") {
    for (std::uint32_t d : {3u, 5u, 7u, 9u, 11u}) {
        const auto c = lsd::surface_code(d);
        CHECK(c.n == d * d);
        CHECK(c.hx.rows() == (d * d - 1) / 2);
        CHECK(c.hz.rows() == (d * d - 1) / 2);
        check_css(c);
    }
    CHECK(error_of([] { lsd::surface_code(4); }) == lsd::ErrorCode::invalid_argument);
    CHECK(error_of([] { lsd::surface_code(1); }) == lsd::ErrorCode::invalid_argument);
}

TEST_CASE("d=5 surface code minimum Z-logical weight is 5") {
    const auto c = lsd::surface_code(5);
    const auto hz_dense = c.hz.to_dense();
    const std::size_t rz = oracle::rank(hz_dense);
    std::size_t best = 0;
    // Walk supports of weight 1..5 in lexicographic order.
    for (std::size_t w = 1; w <= 5 && best == 0; ++w) {
        std::vector<Index> pick(w);
        std::iota(pick.begin(), pick.end(), 0);
        while (true) {
            if (c.hx.multiply(pick).empty()) {
                auto with = hz_dense;
                with.push_back(oracle::indicator(pick, c.n));
                if (oracle::rank(with) > rz) {
                    best = w;
                    break;
                }
            }
            std::size_t i = w;
            while (i > 0 && pick[i - 1] == c.n - w + i - 1) --i;
            if (i == 0) break;
            ++pick[i - 1];
            for (std::size_t j = i; j < w; ++j) pick[j] = pick[j - 1] + 1;
        }
    }
    CHECK(best == 5);
}

TEST_CASE("repetition code") {
    const auto c = lsd::repetition_code(5);
    CHECK(c.n == 5);
    CHECK(c.k == 1);
    CHECK(c.hz.rows() == 0);
    CHECK(lsd::repetition_parity(3).to_dense() == oracle::Dense{{1, 1, 0}, {0, 1, 1}});
    check_css(c);
    CHECK(error_of([] { lsd::repetition_code(1); }) == lsd::ErrorCode::invalid_argument);
}

TEST_CASE("hypergraph product of two [3,1] repetition codes is [[13,1]]") {
    const auto r3 = lsd::repetition_parity(3);
    const auto c = lsd::hypergraph_product(r3, r3);
    CHECK(c.n == 13);
    CHECK(c.k == 1);
    check_css(c);
}

TEST_CASE("hypergraph product rank identity on random inputs") {
    std::mt19937_64 rng(5);
    std::bernoulli_distribution bit(0.35);
    for (int t = 0; t < 40; ++t) {
        auto random = [&](std::size_t r, std::size_t c) {
            oracle::Dense d(r, std::vector<std::uint8_t>(c));
            for (auto& row : d) {
                for (auto& b : row) b = bit(rng);
            }
            return SparseBinaryMatrix::from_dense(d);
        };
        const std::size_t m1 = 1 + rng() % 4, n1 = 1 + rng() % 5, m2 = 1 + rng() % 4, n2 = 1 + rng() % 5;
        const auto h1 = random(m1, n1), h2 = random(m2, n2);
        const auto c = lsd::hypergraph_product(h1, h2);
        CHECK(c.n == n1 * n2 + m1 * m2);
        check_css(c);
        const std::size_t r1 = oracle::rank(h1.to_dense()), r2 = oracle::rank(h2.to_dense());
        CHECK(c.k == (n1 - r1) * (n2 - r2) + (m1 - r1) * (m2 - r2));
    }
}

TEST_CASE("shipped 15x20 seed gives the [[625,25]] hypergraph product") {
    const auto h = lsd::load_dense_matrix(fixtures / "hgp_seed_15x20.txt");
    REQUIRE(h.rows() == 15);
    REQUIRE(h.cols() == 20);
    for (std::size_t c = 0; c < h.cols(); ++c) CHECK(h.col(c).size() == 3);
    for (std::size_t r = 0; r < h.rows(); ++r) CHECK(h.row(r).size() == 4);
    const auto c = lsd::hypergraph_product(h, h);
    CHECK(c.n == 625);
    CHECK(c.k == 25);
    CHECK(is_zero(product_transpose(c.hx, c.hz)));
    CHECK(c.k == c.n - oracle::rank(c.hx.to_dense()) - oracle::rank(c.hz.to_dense()));
}

TEST_CASE("bivariate bicycle with l = m = 1 is all ones blocks") {
    const auto c = lsd::bivariate_bicycle(1, 1, {{0, 0}}, {{0, 0}});
    CHECK(c.n == 2);
    CHECK(c.hx.to_dense() == oracle::Dense{{1, 1}});
    CHECK(c.hz.to_dense() == oracle::Dense{{1, 1}});
    check_css(c);
    CHECK(error_of([] { lsd::bivariate_bicycle(3, 3, {}, {{0, 1}}); }) == lsd::ErrorCode::invalid_argument);
    CHECK(error_of([] { lsd::bivariate_bicycle(0, 3, {{0, 0}}, {{0, 1}}); }) == lsd::ErrorCode::invalid_argument);
}

TEST_CASE("bivariate bicycle commutation over random parameters") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        const auto l = static_cast<std::uint32_t>(1 + rng() % 5), m = static_cast<std::uint32_t>(1 + rng() % 5);
        auto terms = [&] {
            std::vector<lsd::Monomial> v(1 + rng() % 3);
            for (auto& x : v) x = {static_cast<std::uint32_t>(rng() % l), static_cast<std::uint32_t>(rng() % m)};
            return v;
        };
        const auto c = lsd::bivariate_bicycle(l, m, terms(), terms());
        CHECK(c.n == 2 * l * m);
        check_css(c);
    }
}

TEST_CASE("shipped bivariate bicycle config is [[144,12]]") {
    const auto spec = lsd::load_bb_spec(fixtures / "bb_144_12_12.txt");
    CHECK(spec.l == 12);
    CHECK(spec.m == 6);
    const auto c = lsd::bivariate_bicycle(spec);
    CHECK(c.n == 144);
    CHECK(c.k == 12);
    check_css(c);
}

TEST_CASE("bivariate bicycle config parsing") {
    std::istringstream good("# comment\nl 3\nm 2  # trailing\na 0,0 1,1\nb 2,1\n");
    const auto s = lsd::parse_bb_spec(good);
    CHECK(s.l == 3);
    CHECK(s.m == 2);
    REQUIRE(s.a.size() == 2);
    CHECK(s.a[1].x == 1);
    CHECK(s.a[1].y == 1);
    REQUIRE(s.b.size() == 1);
    CHECK(s.b[0].x == 2);
    for (const char* bad : {"l 3\n", "l 3\nm 2\nq 1\n", "l 3\nm 2\na 1;2\n", "l 0\nm 2\n", "l 3\nm 2\na 1,x\n"}) {
        std::istringstream in(bad);
        CHECK(error_of([&] { lsd::parse_bb_spec(in); }) == lsd::ErrorCode::parse);
    }
}

TEST_CASE("random regular matrices") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto h = lsd::random_regular_matrix(15, 20, 3, 4, seed, seed % 2 == 1);
        for (std::size_t c = 0; c < h.cols(); ++c) CHECK(h.col(c).size() == 3);
        for (std::size_t r = 0; r < h.rows(); ++r) CHECK(h.row(r).size() == 4);
        // No 4-cycles: two columns share at most one row.
        const auto d = h.to_dense();
        for (std::size_t a = 0; a < h.cols(); ++a) {
            for (std::size_t b = a + 1; b < h.cols(); ++b) {
                int shared = 0;
                for (std::size_t r = 0; r < h.rows(); ++r) shared += d[r][a] & d[r][b];
                CHECK(shared <= 1);
            }
        }
        if (seed % 2 == 1) CHECK(oracle::rank(d) == 15);
        CHECK(h == lsd::random_regular_matrix(15, 20, 3, 4, seed, seed % 2 == 1));
    }
    CHECK(lsd::random_regular_matrix(15, 20, 3, 4, 1, false) != lsd::random_regular_matrix(15, 20, 3, 4, 2, false));
    CHECK(error_of([] { lsd::random_regular_matrix(15, 20, 3, 3, 1, false); }) == lsd::ErrorCode::invalid_argument);
}

TEST_CASE("dense matrix text round trip and errors") {
    const auto h = lsd::random_regular_matrix(9, 12, 3, 4, 9, false);
    std::stringstream text;
    lsd::write_dense_matrix(text, h);
    CHECK(lsd::parse_dense_matrix(text) == h);
    std::istringstream ragged("1 0 1\n# skip\n1 1\n");
    CHECK(error_of([&] { lsd::parse_dense_matrix(ragged); }) == lsd::ErrorCode::parse);
    std::istringstream digit("1 0 2\n");
    CHECK(error_of([&] { lsd::parse_dense_matrix(digit); }) == lsd::ErrorCode::parse);
    CHECK(error_of([] { lsd::load_dense_matrix("/nonexistent/h.txt"); }) == lsd::ErrorCode::io);
}

TEST_CASE("code capacity model") {
    const auto c = lsd::surface_code(3);
    const auto m = lsd::code_capacity_model(c, lsd::Side::z, 0.1);
    CHECK(m.num_detectors() == 4);
    CHECK(m.num_faults() == 9);
    CHECK(m.num_observables() == c.k);
    CHECK(m.h == c.hz);
    for (double p : m.priors) CHECK(p == 0.1);
    CHECK(lsd::code_capacity_model(c, lsd::Side::x, 0.1).h == c.hx);
    for (double p : {0.0, 1.0, -0.1, 1.5}) {
        CHECK(error_of([&] { lsd::code_capacity_model(c, lsd::Side::z, p); }) == lsd::ErrorCode::invalid_argument);
    }
}

TEST_CASE("phenomenological model layout") {
    const auto c = lsd::surface_code(3);
    for (std::uint32_t rounds : {1u, 2u, 5u}) {
        const auto m = lsd::phenomenological_model(c, lsd::Side::z, 0.01, rounds);
        CHECK(m.num_faults() == rounds * c.n + (rounds - 1) * c.hz.rows());
        CHECK(m.num_detectors() == rounds * c.hz.rows());
        CHECK(m.num_observables() == c.k);
        CHECK(m.h.multiply({}).empty());
        // Data faults of round r hit only round r's detectors, exactly like hz.
        for (std::uint32_t r = 0; r < rounds; ++r) {
            for (std::size_t q = 0; q < c.n; ++q) {
                std::vector<Index> want;
                for (Index i : c.hz.col(q)) want.push_back(static_cast<Index>(r * c.hz.rows() + i));
                const auto got = m.h.col(r * c.n + q);
                CHECK(std::vector<Index>(got.begin(), got.end()) == want);
            }
        }
        // Measurement faults flip the same check in two consecutive rounds.
        for (std::size_t j = rounds * c.n; j < m.num_faults(); ++j) {
            REQUIRE(m.h.col(j).size() == 2);
            CHECK(m.h.col(j)[1] - m.h.col(j)[0] == c.hz.rows());
        }
    }
    CHECK(lsd::phenomenological_model(c, lsd::Side::z, 0.01, 1) == lsd::code_capacity_model(c, lsd::Side::z, 0.01));
    CHECK(error_of([&] { lsd::phenomenological_model(c, lsd::Side::z, 0.01, 0); }) == lsd::ErrorCode::invalid_argument);
}
