#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "lsd/gf2.hpp"

namespace lsd {

/// Detector matrix (rows = detectors, columns = faults), per-fault priors and
/// the fault-to-observable map used to score logical failures.
struct DetectorModel {
    SparseBinaryMatrix h;
    std::vector<double> priors;
    SparseBinaryMatrix observables;

    [[nodiscard]] std::size_t num_detectors() const noexcept { return h.rows(); }
    [[nodiscard]] std::size_t num_faults() const noexcept { return h.cols(); }
    [[nodiscard]] std::size_t num_observables() const noexcept { return observables.rows(); }

    /// Throws invalid_argument if an invariant does not hold.
    void validate() const;

    bool operator==(const DetectorModel&) const = default;
};

/// Faults adjacent iff their columns share a detector. Neighbor lists sorted.
using FaultGraph = std::vector<std::vector<Index>>;

// DEM-TEXT reading and writing. Parse errors carry the line number.
DetectorModel parse_model(std::istream& in);
DetectorModel load_model(const std::filesystem::path& path);
void write_model(std::ostream& out, const DetectorModel& model);
void save_model(const DetectorModel& model, const std::filesystem::path& path);

FaultGraph fault_graph(const SparseBinaryMatrix& h);
inline FaultGraph fault_graph(const DetectorModel& model) { return fault_graph(model.h); }

/// Connected components of the fault graph restricted to `error`. Each
/// component is sorted; components are ordered by their smallest fault.
std::vector<std::vector<Index>> error_clusters(const SparseBinaryMatrix& h, std::span<const Index> error);

/// ln((1-p)/p) per fault.
std::vector<double> channel_llrs(std::span<const double> priors);

/// True iff H·correction equals the syndrome exactly.
bool satisfies_syndrome(const SparseBinaryMatrix& h, std::span<const Index> correction,
                        std::span<const Index> syndrome);

}  // namespace lsd
