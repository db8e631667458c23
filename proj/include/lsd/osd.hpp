#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lsd/gf2.hpp"

namespace lsd {

enum class OsdKind { osd0, osd_e, osd_cs };

struct OsdMethod {
    OsdKind kind = OsdKind::osd0;
    std::uint32_t order = 0;

    static constexpr OsdMethod osd0() { return {OsdKind::osd0, 0}; }
    static constexpr OsdMethod exhaustive(std::uint32_t w) { return {OsdKind::osd_e, w}; }
    static constexpr OsdMethod combination_sweep(std::uint32_t w) { return {OsdKind::osd_cs, w}; }

    void validate() const;
    bool operator==(const OsdMethod&) const = default;
};

/// Sum of LLRs over the support, accumulated in ascending index order.
double soft_weight(std::span<const Index> support, std::span<const double> llrs);

/// Strict "better than" for candidate solutions: soft weight, then Hamming
/// weight, then lexicographic support.
bool better_solution(std::span<const Index> a, std::span<const Index> b, std::span<const double> llrs);

/// Ordered-statistics decoding.
///
/// Columns are ranked by (llr, index) ascending and eliminated in that order;
/// the pivot columns form the information set. OSD-0 leaves every non-pivot
/// column at zero. OSD-E(w) tries every pattern of Hamming weight <= w on the
/// non-pivot columns. OSD-CS(w) tries every weight-1 pattern, then every
/// weight-2 pattern among the first w non-pivot columns in rank order.
/// Throws not_in_image if the syndrome has no solution.
std::vector<Index> osd_decode(const SparseBinaryMatrix& h, std::span<const Index> syndrome,
                              std::span<const double> llrs, OsdMethod method);

}  // namespace lsd
