#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lsd/codes.hpp"
#include "lsd/error.hpp"
#include "lsd/model.hpp"
#include "oracles.hpp"

using lsd::Index;
using lsd::SparseBinaryMatrix;

namespace {

lsd::DetectorModel parse(const std::string& text) {
    std::istringstream in(text);
    return lsd::parse_model(in);
}

lsd::ErrorCode parse_error(const std::string& text, std::string* message = nullptr) {
    try {
        parse(text);
    } catch (const lsd::Error& e) {
        if (message) *message = e.what();
        return e.code();
    }
    return lsd::ErrorCode{};
}

}  // namespace

TEST_CASE("minimal model file") {
    const auto m = parse(
        "# two detectors\n"
        "qdem 1 2 3 1\n"
        "f 0.1 d 0 L 0\n"
        "f 0.2 d 0 1\n"
        "f 0.3 d 1   \n");
    CHECK(m.num_detectors() == 2);
    CHECK(m.num_faults() == 3);
    CHECK(m.num_observables() == 1);
    CHECK(m.h.to_dense() == oracle::Dense{{1, 1, 0}, {0, 1, 1}});
    CHECK(m.observables.to_dense() == oracle::Dense{{1, 0, 0}});
    CHECK(m.priors == std::vector<double>{0.1, 0.2, 0.3});
}

TEST_CASE("round trip through the text format is exact") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        std::ostringstream text;
        const std::size_t d = 1 + rng() % 6, f = 1 + rng() % 8;
        text << "qdem 1 " << d << ' ' << f << " 2\n";
        for (std::size_t j = 0; j < f; ++j) {
            text << "f " << std::uniform_real_distribution<double>(0.001, 0.999)(rng) << " d";
            for (std::size_t r = 0; r < d; ++r) {
                if (rng() & 1) text << ' ' << r;
            }
            if (rng() & 1) text << " L 1";
            text << '\n';
        }
        const auto m = parse(text.str());
        std::ostringstream out;
        lsd::write_model(out, m);
        CHECK(parse(out.str()) == m);
    }
}

TEST_CASE("malformed files report the offending line") {
    std::string msg;
    CHECK(parse_error("qdem 1 2 1 0\nf 0.5 d 2\n", &msg) == lsd::ErrorCode::parse);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(parse_error("qdem 1 2 1 0\nf 0 d 0\n") == lsd::ErrorCode::parse);
    CHECK(parse_error("qdem 1 2 1 0\nf 1 d 0\n") == lsd::ErrorCode::parse);
    CHECK(parse_error("qdem 1 2 1 0\nf 1.5 d 0\n") == lsd::ErrorCode::parse);
    CHECK(parse_error("qdem 1 2 1 0\nf 0.1 d 0 0\n") == lsd::ErrorCode::parse);
    CHECK(parse_error("qdem 1 2 1 1\nf 0.1 d 0 L 3\n") == lsd::ErrorCode::parse);
    CHECK(parse_error("qdem 1 2 2 0\nf 0.1 d 0\n") == lsd::ErrorCode::parse);
    CHECK(parse_error("qdem 2 2 1 0\nf 0.1 d 0\n") == lsd::ErrorCode::parse);
    CHECK(parse_error("qdem 1 2 1 0\nf 0.1 x 0\n") == lsd::ErrorCode::parse);
    CHECK(parse_error("qdem 1 2 1 0\nf abc d 0\n") == lsd::ErrorCode::parse);
    CHECK(parse_error("") == lsd::ErrorCode::parse);
}

TEST_CASE("missing file is an I/O error") {
    try {
        lsd::load_model("/nonexistent/model.dem");
        FAIL("expected an I/O error");
    } catch (const lsd::Error& e) {
        CHECK(e.code() == lsd::ErrorCode::io);
    }
}

TEST_CASE("shipped d=3 surface fixture matches the generator") {
    const auto m = lsd::load_model(std::filesystem::path(LSD_FIXTURES) / "surface_d3_z.dem");
    CHECK(m.num_faults() == 9);
    CHECK(m.num_detectors() == 4);
    CHECK(m == lsd::code_capacity_model(lsd::surface_code(3), lsd::Side::z, 0.1));
}

TEST_CASE("fault graph on tiny matrices") {
    const auto g1 = lsd::fault_graph(SparseBinaryMatrix::from_dense({{1, 1}}));
    CHECK(g1 == lsd::FaultGraph{{1}, {0}});
    const auto g2 = lsd::fault_graph(SparseBinaryMatrix::identity(2));
    CHECK(g2 == lsd::FaultGraph{{}, {}});
}

TEST_CASE("fault graph matches pairwise column intersection") {
    const auto h = lsd::random_regular_matrix(15, 20, 3, 4, 1, false);
    const auto g = lsd::fault_graph(h);
    const auto d = h.to_dense();
    std::size_t max_degree = 0;
    for (std::size_t u = 0; u < h.cols(); ++u) {
        std::vector<Index> want;
        for (std::size_t v = 0; v < h.cols(); ++v) {
            if (u == v) continue;
            bool share = false;
            for (std::size_t r = 0; r < h.rows(); ++r) share = share || (d[r][u] && d[r][v]);
            if (share) want.push_back(static_cast<Index>(v));
        }
        CHECK(g[u] == want);
        max_degree = std::max(max_degree, g[u].size());
    }
    // Column weight 3, row weight 4: each fault sees at most 3·(4−1) others.
    CHECK(max_degree <= 9);
    // Transposed orientation: column weight 4, row weight 3.
    const auto gt = lsd::fault_graph(h.transpose());
    for (const auto& nbrs : gt) CHECK(nbrs.size() <= 8);
}

TEST_CASE("fault graph is invariant under row permutations") {
    const auto h = lsd::random_regular_matrix(15, 20, 3, 4, 2, false);
    auto rows = h.to_dense();
    std::mt19937_64 rng(1);
    std::shuffle(rows.begin(), rows.end(), rng);
    CHECK(lsd::fault_graph(SparseBinaryMatrix::from_dense(rows)) == lsd::fault_graph(h));
}

TEST_CASE("error clusters") {
    const auto h = SparseBinaryMatrix::from_dense({{1, 1, 0, 0}, {0, 1, 1, 0}, {0, 0, 0, 1}});
    CHECK(lsd::error_clusters(h, {}).empty());
    const Index single[] = {2};
    CHECK(lsd::error_clusters(h, single) == std::vector<std::vector<Index>>{{2}});
    const Index two[] = {0, 2, 3};
    // 0 and 2 only connect through fault 1, which is not in the error.
    CHECK(lsd::error_clusters(h, two) == std::vector<std::vector<Index>>{{0}, {2}, {3}});
    const Index chain[] = {0, 1, 2};
    CHECK(lsd::error_clusters(h, chain) == std::vector<std::vector<Index>>{{0, 1, 2}});
}

TEST_CASE("error clusters match a BFS oracle and decouple") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t rows = 2 + rng() % 10, cols = 2 + rng() % 14;
        std::bernoulli_distribution bit(0.2);
        oracle::Dense d(rows, std::vector<std::uint8_t>(cols));
        for (auto& r : d) {
            for (auto& b : r) b = bit(rng);
        }
        const auto h = SparseBinaryMatrix::from_dense(d);
        std::vector<Index> all(cols);
        std::iota(all.begin(), all.end(), 0);
        const auto e = oracle::random_support(rng, all, 0.4);
        const auto got = lsd::error_clusters(h, e);
        REQUIRE(got == oracle::bfs_clusters(h, e));
        for (std::size_t a = 0; a < got.size(); ++a) {
            for (std::size_t b = a + 1; b < got.size(); ++b) {
                for (Index u : got[a]) {
                    for (Index v : got[b]) {
                        for (std::size_t r = 0; r < rows; ++r) CHECK_FALSE((d[r][u] && d[r][v]));
                    }
                }
            }
        }
    }
}

TEST_CASE("channel LLRs") {
    const double p[] = {0.5, 0.1};
    const auto l = lsd::channel_llrs(p);
    CHECK(l[0] == doctest::Approx(0.0));
    CHECK(l[1] == doctest::Approx(std::log(9.0)));
}
