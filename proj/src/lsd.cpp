#include "lsd/lsd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>

#include <tbb/parallel_for.h>

#include "lsd/error.hpp"

namespace lsd {

void LsdConfig::validate() const {
    if (mu_fraction && !(*mu_fraction >= 0.0 && *mu_fraction <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "growth fraction must lie in [0, 1]");
    }
    if (local_reprocessing) local_reprocessing->validate();
}

std::uint32_t LsdConfig::growth_budget(std::size_t num_faults) const {
    if (mu_fraction) return static_cast<std::uint32_t>(std::ceil(*mu_fraction * static_cast<double>(num_faults)));
    return mu;
}

namespace {
using HeapCompare = std::greater<std::pair<double, Index>>;
}

ClusterForest::ClusterForest(const SparseBinaryMatrix& h, std::span<const double> llrs)
    : h_(&h), llrs_(llrs), detector_owner_(h.rows(), none), fault_owner_(h.cols(), none) {
    if (llrs.size() != h.cols()) throw Error(ErrorCode::invalid_argument, "LLR count does not match H");
    for (double l : llrs) {
        if (!std::isfinite(l)) throw Error(ErrorCode::invalid_argument, "LLRs must be finite");
    }
}

Index ClusterForest::create_cluster(Index detector) {
    if (detector >= h_->rows()) throw Error(ErrorCode::invalid_argument, "detector index out of range");
    if (detector_owner_[detector] != none) {
        throw Error(ErrorCode::invalid_argument, "detector already belongs to a cluster");
    }
    const auto id = static_cast<Index>(clusters_.size());
    parent_.push_back(id);
    Cluster& c = clusters_.emplace_back();
    c.id = id;
    c.detectors.push_back(detector);
    c.syndrome.push_back(detector);
    c.fact.toggle_syndrome_row(detector);
    c.valid = c.fact.syndrome_in_image();
    detector_owner_[detector] = id;
    push_candidates(c, detector);
    return id;
}

Index ClusterForest::find(Index id) const {
    while (parent_[id] != id) id = parent_[id];
    return id;
}

Index ClusterForest::find_compress(Index id) {
    Index root = find(id);
    while (parent_[id] != root) {
        const Index next = parent_[id];
        parent_[id] = root;
        id = next;
    }
    return root;
}

void ClusterForest::link(Index a, Index b) {
    a = find_compress(a);
    b = find_compress(b);
    if (a == b) return;
    parent_[std::max(a, b)] = std::min(a, b);
}

std::vector<Index> ClusterForest::roots() const {
    std::vector<Index> out;
    for (Index id = 0; id < parent_.size(); ++id) {
        if (parent_[id] == id) out.push_back(id);
    }
    return out;
}

std::optional<Index> ClusterForest::detector_owner(Index detector) const {
    const Index owner = detector_owner_.at(detector);
    if (owner == none) return std::nullopt;
    return find(owner);
}

std::optional<Index> ClusterForest::fault_owner(Index fault) const {
    const Index owner = fault_owner_.at(fault);
    if (owner == none) return std::nullopt;
    return find(owner);
}

void ClusterForest::push_candidates(Cluster& c, Index detector) {
    for (Index f : h_->row(detector)) {
        c.heap.emplace_back(llrs_[f], f);
        std::push_heap(c.heap.begin(), c.heap.end(), HeapCompare{});
    }
}

std::optional<Index> ClusterForest::select_candidate(Index root) {
    Cluster& c = clusters_.at(root);
    // A fault adjacent to one of our detectors can only be owned by us, so
    // any owned entry is stale.
    while (!c.heap.empty() && fault_owner_[c.heap.front().second] != none) {
        std::pop_heap(c.heap.begin(), c.heap.end(), HeapCompare{});
        c.heap.pop_back();
    }
    if (c.heap.empty()) return std::nullopt;
    return c.heap.front().second;
}

void ClusterForest::detect_and_merge(std::span<const Growth> grown, bool parallel) {
    // Grouping and ownership bookkeeping run serially; this is the only
    // synchronization point between clusters.
    std::vector<Index> absorbed;
    std::vector<std::vector<Index>> new_detectors(grown.size());
    for (std::size_t g = 0; g < grown.size(); ++g) {
        const Index f = grown[g].fault;
        if (f >= h_->cols()) throw Error(ErrorCode::invalid_argument, "fault index out of range");
        if (fault_owner_[f] != none) throw Error(ErrorCode::invalid_argument, "grown fault is already owned");
        Index r = find_compress(grown[g].cluster);
        for (Index d : h_->col(f)) {
            const Index owner = detector_owner_[d];
            if (owner == none) {
                detector_owner_[d] = r;
                new_detectors[g].push_back(d);
                continue;
            }
            const Index other = find_compress(owner);
            if (other != r) {
                absorbed.push_back(std::max(other, r));
                link(other, r);
                r = find_compress(r);
            }
        }
    }

    struct Group {
        Index root;
        std::vector<Index> members;
        std::vector<std::size_t> growths;
    };
    std::map<Index, Group> groups;
    for (Index id : absorbed) {
        const Index root = find_compress(id);
        auto& group = groups.try_emplace(root, Group{root, {}, {}}).first->second;
        group.members.push_back(id);
    }
    for (std::size_t g = 0; g < grown.size(); ++g) {
        const Index root = find_compress(grown[g].cluster);
        groups.try_emplace(root, Group{root, {}, {}}).first->second.growths.push_back(g);
    }
    std::vector<Group*> work;
    for (auto& [root, group] : groups) {
        std::sort(group.members.begin(), group.members.end());
        group.members.erase(std::unique(group.members.begin(), group.members.end()), group.members.end());
        work.push_back(&group);
    }

    auto process = [&](Group& group) {
        Cluster& target = clusters_[group.root];
        for (Index id : group.members) {
            Cluster& src = clusters_[id];
            target.fact.absorb(std::move(src.fact));
            target.faults.insert(target.faults.end(), src.faults.begin(), src.faults.end());
            target.detectors.insert(target.detectors.end(), src.detectors.begin(), src.detectors.end());
            target.syndrome.insert(target.syndrome.end(), src.syndrome.begin(), src.syndrome.end());
            target.heap.insert(target.heap.end(), src.heap.begin(), src.heap.end());
            src = Cluster{};
            src.id = id;
        }
        if (!group.members.empty()) std::make_heap(target.heap.begin(), target.heap.end(), HeapCompare{});
        for (std::size_t g : group.growths) {
            const Index f = grown[g].fault;
            if (target.fact.contains_col(f)) continue;  // chosen by two clusters of this group
            target.fact.add_column(f, h_->col(f));
            target.faults.push_back(f);
            fault_owner_[f] = group.root;
            for (Index d : new_detectors[g]) {
                target.detectors.push_back(d);
                push_candidates(target, d);
            }
        }
        target.valid = target.fact.syndrome_in_image();
    };

    if (parallel && work.size() > 1) {
        tbb::parallel_for(std::size_t{0}, work.size(), [&](std::size_t i) { process(*work[i]); });
    } else {
        for (Group* group : work) process(*group);
    }
}

Index ClusterForest::grow_cluster(Index root) {
    const auto f = select_candidate(root);
    if (!f) {
        throw Error(ErrorCode::unsatisfiable,
                    "cluster " + std::to_string(root) + " is invalid and has no candidate faults");
    }
    const Growth growth{root, *f};
    detect_and_merge(std::span<const Growth>(&growth, 1));
    return *f;
}

bool ClusterForest::refresh_validity(Index root) {
    Cluster& c = clusters_.at(root);
    c.valid = c.fact.syndrome_in_image();
    return c.valid;
}

std::vector<Index> ClusterForest::boundary(Index root) const {
    const Cluster& c = clusters_.at(root);
    std::vector<Index> out;
    for (Index d : c.detectors) {
        for (Index f : h_->row(d)) {
            const Index owner = fault_owner_[f];
            if (owner == none || find(owner) != root) {
                out.push_back(d);
                break;
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Index> ClusterForest::candidates(Index root) const {
    std::vector<Index> out;
    for (Index d : boundary(root)) {
        for (Index f : h_->row(d)) {
            const Index owner = fault_owner_[f];
            if (owner == none || find(owner) != root) out.push_back(f);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

// One growth step for every root in `targets` that is still a root.
// Returns the number of faults added.
std::size_t grow_round(ClusterForest& forest, const std::vector<Index>& targets, bool parallel,
                       bool require_growth) {
    if (!parallel) {
        std::size_t grown = 0;
        for (Index id : targets) {
            if (forest.find(id) != id) continue;
            if (require_growth) {
                forest.grow_cluster(id);
                ++grown;
            } else if (auto f = forest.select_candidate(id)) {
                const ClusterForest::Growth growth{id, *f};
                forest.detect_and_merge(std::span<const ClusterForest::Growth>(&growth, 1));
                ++grown;
            }
        }
        return grown;
    }
    std::vector<Index> live;
    for (Index id : targets) {
        if (forest.find(id) == id) live.push_back(id);
    }
    std::vector<std::optional<Index>> choice(live.size());
    tbb::parallel_for(std::size_t{0}, live.size(), [&](std::size_t i) { choice[i] = forest.select_candidate(live[i]); });
    std::vector<ClusterForest::Growth> batch;
    for (std::size_t i = 0; i < live.size(); ++i) {
        if (choice[i]) {
            batch.push_back({live[i], *choice[i]});
        } else if (require_growth) {
            throw Error(ErrorCode::unsatisfiable,
                        "cluster " + std::to_string(live[i]) + " is invalid and has no candidate faults");
        }
    }
    forest.detect_and_merge(batch, true);
    return batch.size();
}

}  // namespace

LsdResult lsd_decode(const SparseBinaryMatrix& h, std::span<const Index> syndrome, std::span<const double> llrs,
                     const LsdConfig& config) {
    config.validate();
    LsdResult result;
    std::vector<Index> flipped(syndrome.begin(), syndrome.end());
    std::sort(flipped.begin(), flipped.end());
    if (std::adjacent_find(flipped.begin(), flipped.end()) != flipped.end()) {
        throw Error(ErrorCode::invalid_argument, "syndrome lists a detector twice");
    }
    if (flipped.empty()) return result;

    ClusterForest forest(h, llrs);
    for (Index d : flipped) forest.create_cluster(d);

    auto invalid_roots = [&] {
        std::vector<Index> out;
        for (Index id : forest.roots()) {
            if (!forest.refresh_validity(id)) out.push_back(id);
        }
        return out;
    };
    for (auto invalid = invalid_roots(); !invalid.empty(); invalid = invalid_roots()) {
        grow_round(forest, invalid, config.parallel, true);
        ++result.sweeps;
    }

    const std::uint32_t budget = config.growth_budget(h.cols());
    for (std::uint32_t step = 0; step < budget; ++step) {
        if (grow_round(forest, forest.roots(), config.parallel, false) == 0) break;
    }

    for (Index id : forest.roots()) {
        const Cluster& c = forest.cluster(id);
        std::vector<Index> local;
        if (budget > 0 && config.local_reprocessing) {
            std::vector<Index> rows = c.detectors, cols = c.faults, local_syndrome;
            std::sort(rows.begin(), rows.end());
            std::sort(cols.begin(), cols.end());
            for (Index d : c.syndrome) {
                local_syndrome.push_back(
                    static_cast<Index>(std::lower_bound(rows.begin(), rows.end(), d) - rows.begin()));
            }
            std::vector<double> local_llrs;
            local_llrs.reserve(cols.size());
            for (Index f : cols) local_llrs.push_back(llrs[f]);
            const auto sub = h.submatrix(rows, cols);
            for (Index j : osd_decode(sub, local_syndrome, local_llrs, *config.local_reprocessing)) {
                local.push_back(cols[j]);
            }
        } else {
            local = c.fact.solve_syndrome();
        }
        result.correction.insert(result.correction.end(), local.begin(), local.end());
        std::vector<Index> faults = c.faults;
        std::sort(faults.begin(), faults.end());
        result.kappa = std::max(result.kappa, faults.size());
        result.columns_eliminated += c.fact.columns_eliminated();
        result.clusters.push_back(std::move(faults));
    }
    std::sort(result.correction.begin(), result.correction.end());
    result.nu = result.clusters.size();
    std::size_t total = 0;
    for (const auto& c : result.clusters) total += c.size();
    result.kappa_alpha = result.nu == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(result.nu);
    return result;
}

}  // namespace lsd
