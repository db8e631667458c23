#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lsd/gf2.hpp"
#include "lsd/model.hpp"

namespace lsd {

enum class BpSchedule { parallel, serial };

struct BpConfig {
    std::uint32_t max_iterations = 30;
    double scaling_factor = 0.625;
    BpSchedule schedule = BpSchedule::parallel;
    double clip = 50.0;

    void validate() const;
};

struct BpResult {
    bool converged = false;
    std::uint32_t iterations = 0;
    std::vector<Index> hard;   // sorted fault support
    std::vector<double> llrs;  // posterior LLRs at termination
};

/// Scaled min-sum belief propagation on a fixed Tanner graph.
///
/// Messages live on edges in check-major order. The check update multiplies
/// the minimum incoming magnitude by the scaling factor and carries the
/// syndrome bit in its sign. After each iteration the hard decision
/// (posterior < 0) is tested against the syndrome.
class BpDecoder {
public:
    BpDecoder(const SparseBinaryMatrix& h, std::vector<double> channel_llrs, BpConfig config = {});

    [[nodiscard]] BpResult decode(std::span<const Index> syndrome) const;

    [[nodiscard]] const BpConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::vector<double>& channel() const noexcept { return channel_; }

private:
    void update_check(std::size_t c, bool flipped, const std::vector<double>& v2c,
                      std::vector<double>& c2v) const;
    [[nodiscard]] double check_to_edge(std::size_t c, std::size_t edge, bool flipped,
                                       const std::vector<double>& v2c) const;
    [[nodiscard]] bool matches(const std::vector<std::uint8_t>& hard, const std::vector<std::uint8_t>& flipped) const;

    std::vector<double> channel_;
    BpConfig config_;
    std::size_t num_checks_ = 0;
    std::vector<std::size_t> check_begin_;  // edge range per check
    std::vector<Index> edge_check_;
    std::vector<Index> edge_var_;
    std::vector<std::vector<std::size_t>> var_edges_;
};

BpResult bp_decode(const DetectorModel& model, std::span<const Index> syndrome, const BpConfig& config = {});

}  // namespace lsd
