#include <random>

#include "doctest.h"
#include "lsd/codes.hpp"
#include "lsd/error.hpp"
#include "lsd/lsd.hpp"
#include "lsd/osd.hpp"
#include "oracles.hpp"

using lsd::ClusterForest;
using lsd::Index;
using lsd::LsdConfig;
using lsd::SparseBinaryMatrix;

namespace {

SparseBinaryMatrix rep3() { return SparseBinaryMatrix::from_dense({{1, 1, 0}, {0, 1, 1}}); }

SparseBinaryMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double density) {
    std::bernoulli_distribution bit(density);
    oracle::Dense d(rows, std::vector<std::uint8_t>(cols));
    for (auto& r : d) {
        for (auto& b : r) b = bit(rng);
    }
    return SparseBinaryMatrix::from_dense(d);
}

std::vector<Index> sample(std::mt19937_64& rng, std::size_t n, double p) {
    std::bernoulli_distribution flip(p);
    std::vector<Index> e;
    for (std::size_t j = 0; j < n; ++j) {
        if (flip(rng)) e.push_back(static_cast<Index>(j));
    }
    return e;
}

// Checks the structural invariants of a finished decode.
void check_result(const SparseBinaryMatrix& h, std::span<const Index> s, const lsd::LsdResult& r) {
    CHECK(h.multiply(r.correction) == std::vector<Index>(s.begin(), s.end()));
    std::vector<int> seen(h.cols(), 0);
    std::vector<int> det_seen(h.rows(), 0);
    for (const auto& c : r.clusters) {
        std::set<Index> dets;
        for (Index f : c) {
            ++seen[f];
            for (Index d : h.col(f)) dets.insert(d);
        }
        for (Index d : dets) ++det_seen[d];
    }
    for (int v : seen) CHECK(v <= 1);
    for (int v : det_seen) CHECK(v <= 1);
    for (Index f : r.correction) CHECK(seen[f] == 1);
    CHECK(r.nu == r.clusters.size());
    if (r.nu > 0) CHECK(static_cast<double>(r.kappa) >= r.kappa_alpha);
}

}  // namespace

TEST_CASE("empty syndrome yields the empty correction") {
    const std::vector<double> llrs(3, 1.0);
    const auto r = lsd::lsd_decode(rep3(), {}, llrs);
    CHECK(r.correction.empty());
    CHECK(r.nu == 0);
}

TEST_CASE("repetition code: two flipped checks merge onto the middle fault") {
    const std::vector<double> llrs(3, 2.0);
    const Index s[] = {0, 1};
    const auto r = lsd::lsd_decode(rep3(), s, llrs);
    CHECK(r.correction == std::vector<Index>{1});
    CHECK(r.nu == 1);
}

TEST_CASE("growth picks the least reliable incident fault") {
    const auto h = rep3();
    const std::vector<double> llrs{0.1, 0.9, 0.5};
    ClusterForest forest(h, llrs);
    const Index id = forest.create_cluster(0);
    CHECK(forest.grow_cluster(id) == 0);
}

TEST_CASE("equal LLRs break ties towards the lower index") {
    const auto h = rep3();
    const std::vector<double> llrs{0.7, 0.7, 0.7};
    ClusterForest forest(h, llrs);
    const Index id = forest.create_cluster(1);
    CHECK(forest.grow_cluster(id) == 1);
}

TEST_CASE("chosen fault is the (llr, index) minimum of the candidate set") {
    std::mt19937_64 rng(43);
    const auto h = lsd::code_capacity_model(lsd::surface_code(7), lsd::Side::z, 0.1).h;
    for (int t = 0; t < 100; ++t) {
        std::vector<double> llrs(h.cols());
        for (auto& l : llrs) l = static_cast<double>(rng() % 5);  // many ties
        ClusterForest forest(h, llrs);
        const Index id = forest.create_cluster(static_cast<Index>(rng() % h.rows()));
        const int steps = static_cast<int>(rng() % 6);
        for (int i = 0; i < steps; ++i) forest.grow_cluster(id);
        auto cand = forest.candidates(id);
        if (cand.empty()) continue;
        std::sort(cand.begin(), cand.end(),
                  [&](Index a, Index b) { return std::pair(llrs[a], a) < std::pair(llrs[b], b); });
        CHECK(forest.grow_cluster(id) == cand.front());
    }
}

TEST_CASE("boundary and candidate bookkeeping follow their definitions") {
    std::mt19937_64 rng(47);
    const auto h = lsd::code_capacity_model(lsd::surface_code(5), lsd::Side::z, 0.1).h;
    std::vector<double> llrs(h.cols());
    for (auto& l : llrs) l = std::uniform_real_distribution<double>(0, 4)(rng);
    ClusterForest forest(h, llrs);
    const Index id = forest.create_cluster(3);
    for (int i = 0; i < 5; ++i) {
        const auto& c = forest.cluster(forest.find(id));
        for (Index d : forest.boundary(forest.find(id))) {
            CHECK(std::find(c.detectors.begin(), c.detectors.end(), d) != c.detectors.end());
            bool outside = false;
            for (Index f : h.row(d)) outside = outside || std::find(c.faults.begin(), c.faults.end(), f) == c.faults.end();
            CHECK(outside);
        }
        for (Index f : forest.candidates(forest.find(id))) {
            CHECK(std::find(c.faults.begin(), c.faults.end(), f) == c.faults.end());
        }
        CHECK(c.fact.col_order() == c.faults);
        if (forest.candidates(forest.find(id)).empty()) break;
        forest.grow_cluster(forest.find(id));
    }
}

TEST_CASE("adjacent flipped checks collide on their shared fault") {
    const auto h = rep3();
    const std::vector<double> llrs{5.0, 1.0, 5.0};
    ClusterForest forest(h, llrs);
    const Index a = forest.create_cluster(0);
    const Index b = forest.create_cluster(1);
    const ClusterForest::Growth grown[] = {{a, 1}};
    forest.detect_and_merge(grown);
    CHECK(forest.roots() == std::vector<Index>{a});
    CHECK(forest.find(b) == a);
    CHECK(forest.refresh_validity(a));
}

TEST_CASE("well-separated errors on the d=9 surface code never merge") {
    const auto m = lsd::code_capacity_model(lsd::surface_code(9), lsd::Side::z, 0.01);
    const Index e[] = {0, static_cast<Index>(m.num_faults() - 1)};
    const auto s = m.h.multiply(e);
    const auto r = lsd::lsd_decode(m.h, s, lsd::channel_llrs(m.priors));
    CHECK(r.nu == 2);
    CHECK(m.h.multiply(r.correction) == s);
}

TEST_CASE("merged validity matches the dense image test") {
    std::mt19937_64 rng(53);
    for (int t = 0; t < 300; ++t) {
        const auto h = random_matrix(rng, 10, 14, 0.25);
        std::vector<double> llrs(h.cols());
        for (auto& l : llrs) l = std::uniform_real_distribution<double>(0, 3)(rng);
        const auto s = h.multiply(sample(rng, h.cols(), 0.3));
        if (s.size() < 2) continue;
        ClusterForest forest(h, llrs);
        for (Index d : s) forest.create_cluster(d);
        for (int step = 0; step < 4; ++step) {
            for (Index id : forest.roots()) {
                if (forest.find(id) != id || forest.refresh_validity(id)) continue;
                if (forest.candidates(id).empty()) continue;
                forest.grow_cluster(id);
            }
            for (Index id : forest.roots()) {
                const auto& c = forest.cluster(id);
                std::vector<Index> rows = c.detectors, cols = c.faults;
                std::sort(rows.begin(), rows.end());
                std::sort(cols.begin(), cols.end());
                const auto sub = h.submatrix(rows, cols).to_dense();
                std::vector<std::uint8_t> local(rows.size(), 0);
                for (Index d : c.syndrome) local[std::lower_bound(rows.begin(), rows.end(), d) - rows.begin()] = 1;
                const bool want = cols.empty() ? std::all_of(local.begin(), local.end(), [](auto b) { return !b; })
                                               : oracle::in_image(sub, local);
                CHECK(forest.refresh_validity(id) == want);
            }
        }
    }
}

TEST_CASE("unsatisfiable syndromes raise a typed error") {
    const auto h = SparseBinaryMatrix::from_dense({{1, 1}, {1, 1}});
    const std::vector<double> llrs{1.0, 1.0};
    const Index s[] = {0};
    try {
        (void)lsd::lsd_decode(h, s, llrs);
        FAIL("expected unsatisfiable");
    } catch (const lsd::Error& e) {
        CHECK(e.code() == lsd::ErrorCode::unsatisfiable);
    }
    const Index dup[] = {0, 0};
    CHECK_THROWS_AS(lsd::lsd_decode(h, dup, llrs), lsd::Error);
}

TEST_CASE("decodes satisfy the syndrome with disjoint clusters, serial and parallel") {
    std::mt19937_64 rng(59);
    const auto surface = lsd::code_capacity_model(lsd::surface_code(7), lsd::Side::z, 0.08);
    const auto hgp = lsd::hypergraph_product(lsd::random_regular_matrix(9, 12, 3, 4, 5, false),
                                             lsd::random_regular_matrix(9, 12, 3, 4, 5, false));
    for (const auto* h : {&surface.h, &hgp.hz}) {
        for (int t = 0; t < 200; ++t) {
            std::vector<double> llrs(h->cols());
            for (auto& l : llrs) l = std::uniform_real_distribution<double>(-0.5, 4)(rng);
            const auto s = h->multiply(sample(rng, h->cols(), 0.06));
            for (bool parallel : {false, true}) {
                LsdConfig c;
                c.parallel = parallel;
                const auto r = lsd::lsd_decode(*h, s, llrs, c);
                check_result(*h, s, r);
                if (!parallel) {
                    const auto again = lsd::lsd_decode(*h, s, llrs, c);
                    CHECK(again.correction == r.correction);
                    CHECK(again.nu == r.nu);
                    CHECK(again.kappa == r.kappa);
                }
            }
        }
    }
}

TEST_CASE("mu = 0 reproduces the LSD-0 output") {
    std::mt19937_64 rng(61);
    const auto m = lsd::code_capacity_model(lsd::surface_code(5), lsd::Side::z, 0.1);
    for (int t = 0; t < 100; ++t) {
        const auto s = m.h.multiply(sample(rng, m.num_faults(), 0.1));
        std::vector<double> llrs(m.num_faults());
        for (auto& l : llrs) l = std::uniform_real_distribution<double>(0, 4)(rng);
        LsdConfig c;
        c.local_reprocessing = lsd::OsdMethod::exhaustive(2);
        const auto a = lsd::lsd_decode(m.h, s, llrs);
        const auto b = lsd::lsd_decode(m.h, s, llrs, c);
        CHECK(a.correction == b.correction);
        CHECK(a.clusters == b.clusters);
    }
}

TEST_CASE("whole-matrix LSD-mu equals global OSD-E on connected codes") {
    std::mt19937_64 rng(67);
    const auto m = lsd::code_capacity_model(lsd::surface_code(3), lsd::Side::z, 0.1);
    for (int t = 0; t < 200; ++t) {
        const auto s = m.h.multiply(sample(rng, m.num_faults(), 0.2));
        if (s.empty()) continue;
        std::vector<double> llrs(m.num_faults());
        for (auto& l : llrs) l = std::uniform_real_distribution<double>(0.1, 4)(rng);
        for (std::uint32_t w : {1u, 2u, 9u}) {
            LsdConfig c;
            c.mu_fraction = 1.0;
            c.local_reprocessing = lsd::OsdMethod::exhaustive(w);
            const auto r = lsd::lsd_decode(m.h, s, llrs, c);
            REQUIRE(r.nu == 1);
            CHECK(r.kappa == m.num_faults());
            CHECK(r.correction == lsd::osd_decode(m.h, s, llrs, lsd::OsdMethod::exhaustive(w)));
        }
    }
}

TEST_CASE("full-order LSD-mu reaches the brute-force minimum soft weight") {
    std::mt19937_64 rng(71);
    for (int t = 0; t < 300; ++t) {
        const std::size_t rows = 3 + rng() % 8, cols = 3 + rng() % 14;
        const auto h = random_matrix(rng, rows, cols, 0.25);
        std::vector<double> llrs(cols);
        for (auto& l : llrs) l = std::uniform_real_distribution<double>(0.05, 5)(rng);
        const auto s = h.multiply(sample(rng, cols, 0.3));
        LsdConfig c;
        c.mu_fraction = 1.0;
        c.local_reprocessing = lsd::OsdMethod::exhaustive(static_cast<std::uint32_t>(cols));
        const auto r = lsd::lsd_decode(h, s, llrs, c);
        REQUIRE(h.multiply(r.correction) == s);
        CHECK(lsd::soft_weight(r.correction, llrs) == *oracle::min_soft_weight(h, s, llrs));
    }
}

TEST_CASE("growth budget") {
    LsdConfig c;
    c.mu = 4;
    CHECK(c.growth_budget(100) == 4);
    c.mu_fraction = 0.05;
    CHECK(c.growth_budget(101) == 6);
    c.mu_fraction = 1.5;
    CHECK_THROWS_AS(c.validate(), lsd::Error);
}
