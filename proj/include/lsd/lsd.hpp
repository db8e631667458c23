#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lsd/gf2.hpp"
#include "lsd/osd.hpp"

namespace lsd {

struct LsdConfig {
    /// Extra growth steps per root cluster once every cluster is valid.
    std::uint32_t mu = 0;
    /// Alternative budget: ceil(fraction * number of faults). Overrides mu.
    std::optional<double> mu_fraction;
    /// Local OSD run inside each grown cluster; plain PLU solve when empty.
    std::optional<OsdMethod> local_reprocessing;
    bool parallel = false;

    void validate() const;
    [[nodiscard]] std::uint32_t growth_budget(std::size_t num_faults) const;
};

/// One cluster of the decoding graph together with its incremental
/// factorization. `faults` lists columns in insertion order, which is the
/// column order of `fact`.
struct Cluster {
    Index id = 0;
    std::vector<Index> faults;
    std::vector<Index> detectors;
    std::vector<Index> syndrome;  // flipped detectors enclosed by the cluster
    OtfFactorization fact;
    std::vector<std::pair<double, Index>> heap;  // lazy min-heap of candidate faults
    bool valid = false;
};

/// Union-find forest of clusters over a fixed detector matrix.
///
/// Every detector and fault is owned by at most one live root. Ownership is
/// recorded by cluster id and resolved through find(), so merges only relink
/// parents. The matrix and LLRs must outlive the forest.
class ClusterForest {
public:
    struct Growth {
        Index cluster;
        Index fault;
    };

    ClusterForest(const SparseBinaryMatrix& h, std::span<const double> llrs);

    /// New cluster seeded by a flipped detector; ids count up from zero.
    Index create_cluster(Index detector);

    [[nodiscard]] Index find(Index id) const;
    [[nodiscard]] std::vector<Index> roots() const;
    [[nodiscard]] const Cluster& cluster(Index id) const { return clusters_.at(id); }
    [[nodiscard]] std::size_t size() const noexcept { return clusters_.size(); }

    [[nodiscard]] std::optional<Index> detector_owner(Index detector) const;
    [[nodiscard]] std::optional<Index> fault_owner(Index fault) const;

    /// Lowest (llr, index) candidate of a root; stale heap entries are dropped.
    std::optional<Index> select_candidate(Index root);

    /// Attaches each grown fault to its cluster. Clusters that end up sharing a
    /// detector, either an existing one or one newly enclosed in this batch,
    /// are merged into the lowest id; the others are absorbed into it in
    /// ascending id order before the grown columns are added. With `parallel`
    /// the per-group elimination work runs concurrently.
    void detect_and_merge(std::span<const Growth> grown, bool parallel = false);

    /// select_candidate + detect_and_merge. Throws unsatisfiable when the
    /// cluster has no candidates left. Returns the chosen fault.
    Index grow_cluster(Index root);

    /// Re-evaluates validity of a root from its factorization.
    bool refresh_validity(Index root);

    /// Boundary detectors and candidate faults computed from their
    /// definitions; used for checking the incremental bookkeeping.
    [[nodiscard]] std::vector<Index> boundary(Index root) const;
    [[nodiscard]] std::vector<Index> candidates(Index root) const;

private:
    static constexpr Index none = ~Index{0};

    void push_candidates(Cluster& c, Index detector);
    void link(Index a, Index b);
    Index find_compress(Index id);

    const SparseBinaryMatrix* h_;
    std::span<const double> llrs_;
    std::vector<Index> parent_;
    std::vector<Cluster> clusters_;
    std::vector<Index> detector_owner_;
    std::vector<Index> fault_owner_;
};

struct LsdResult {
    std::vector<Index> correction;
    std::vector<std::vector<Index>> clusters;  // sorted fault sets of the final roots
    std::size_t nu = 0;
    std::size_t kappa = 0;
    double kappa_alpha = 0.0;
    std::size_t sweeps = 0;
    std::size_t columns_eliminated = 0;
};

/// Localized statistics decoding of a syndrome, guided by per-fault LLRs.
/// An empty syndrome returns the empty correction. Throws unsatisfiable if
/// the syndrome is not in the image of H.
LsdResult lsd_decode(const SparseBinaryMatrix& h, std::span<const Index> syndrome,
                     std::span<const double> llrs, const LsdConfig& config = {});

}  // namespace lsd
