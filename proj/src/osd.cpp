#include "lsd/osd.hpp"

#include <algorithm>
#include <numeric>

#include "lsd/error.hpp"

namespace lsd {

void OsdMethod::validate() const {
    if ((kind == OsdKind::osd0) != (order == 0)) {
        throw Error(ErrorCode::invalid_argument, "order 0 is exactly OSD-0; higher orders need osd_e or osd_cs");
    }
}

double soft_weight(std::span<const Index> support, std::span<const double> llrs) {
    double total = 0.0;
    for (Index i : support) total += llrs[i];
    return total;
}

bool better_solution(std::span<const Index> a, std::span<const Index> b, std::span<const double> llrs) {
    const double wa = soft_weight(a, llrs), wb = soft_weight(b, llrs);
    if (wa != wb) return wa < wb;
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

namespace {

struct Search {
    std::span<const double> llrs;
    std::vector<std::vector<Index>> deltas;  // one per non-pivot column, in rank order
    std::vector<Index> best;

    void offer(std::vector<Index>&& candidate) {
        if (better_solution(candidate, best, llrs)) best = std::move(candidate);
    }

    // All patterns of weight 1..depth over deltas[from..limit).
    void exhaustive(const std::vector<Index>& base, std::size_t from, std::size_t limit, std::uint32_t depth) {
        if (depth == 0) return;
        for (std::size_t j = from; j < limit; ++j) {
            auto next = xor_support(base, deltas[j]);
            if (depth > 1) exhaustive(next, j + 1, limit, depth - 1);
            offer(std::move(next));
        }
    }
};

}  // namespace

std::vector<Index> osd_decode(const SparseBinaryMatrix& h, std::span<const Index> syndrome,
                              std::span<const double> llrs, OsdMethod method) {
    method.validate();
    if (llrs.size() != h.cols()) throw Error(ErrorCode::invalid_argument, "LLR count does not match H");

    std::vector<Index> ranking(h.cols());
    std::iota(ranking.begin(), ranking.end(), Index{0});
    std::stable_sort(ranking.begin(), ranking.end(),
                     [&](Index a, Index b) { return llrs[a] < llrs[b] || (llrs[a] == llrs[b] && a < b); });

    OtfFactorization fact;
    for (std::size_t r = 0; r < h.rows(); ++r) fact.add_row(static_cast<Index>(r));
    for (Index r : syndrome) {
        if (r >= h.rows()) throw Error(ErrorCode::invalid_argument, "syndrome index out of range");
        fact.toggle_syndrome_row(r);
    }
    for (Index c : ranking) fact.add_column(c, h.col(c));
    if (!fact.syndrome_in_image()) throw Error(ErrorCode::not_in_image, "syndrome is not in the image of H");

    Search search{llrs, {}, fact.solve_syndrome()};
    if (method.kind == OsdKind::osd0) return search.best;

    // Non-pivot columns in rank order; each yields the kernel vector that
    // sets it to one and re-solves the information set.
    for (std::size_t position : fact.dependent_cols()) {
        const Index j = fact.col_order()[position];
        auto delta = fact.solve(h.col(j));
        const std::vector<Index> unit{j};
        search.deltas.push_back(xor_support(delta, unit));
    }
    const std::vector<Index> base = search.best;
    const std::size_t free_count = search.deltas.size();

    if (method.kind == OsdKind::osd_e) {
        search.exhaustive(base, 0, free_count, method.order);
    } else {
        search.exhaustive(base, 0, free_count, 1);
        const std::size_t limit = std::min<std::size_t>(method.order, free_count);
        for (std::size_t a = 0; a < limit; ++a) {
            for (std::size_t b = a + 1; b < limit; ++b) {
                search.offer(xor_support(xor_support(base, search.deltas[a]), search.deltas[b]));
            }
        }
    }
    return search.best;
}

}  // namespace lsd
