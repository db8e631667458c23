#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lsd/bp.hpp"
#include "lsd/lsd.hpp"
#include "lsd/model.hpp"
#include "lsd/osd.hpp"

namespace lsd {

enum class PostProcessor { none, lsd, osd };

/// Decoder pipeline: optional BP pre-decoding followed by an optional
/// post-processor that runs only when BP did not converge.
struct DecoderSpec {
    bool use_bp = true;
    BpConfig bp;
    PostProcessor post = PostProcessor::lsd;
    LsdConfig lsd;
    OsdMethod osd;

    void validate() const;
    [[nodiscard]] std::string describe() const;
};

struct DecodeOutcome {
    std::vector<Index> correction;
    bool bp_converged = false;
    bool lsd_invoked = false;
    bool satisfied = false;
    std::size_t nu = 0;
    std::size_t kappa = 0;
    double kappa_alpha = 0.0;
    std::size_t cluster_faults = 0;  // total fault columns over all clusters
};

class Decoder {
public:
    Decoder(const DetectorModel& model, DecoderSpec spec);

    /// Throws unsatisfiable if the post-processor finds no solution.
    [[nodiscard]] DecodeOutcome decode(std::span<const Index> syndrome) const;

    [[nodiscard]] const DecoderSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const SparseBinaryMatrix& h() const noexcept { return h_; }

private:
    SparseBinaryMatrix h_;
    std::vector<double> channel_;
    DecoderSpec spec_;
    std::optional<BpDecoder> bp_;
};

/// Round structure of a detector model: detector d belongs to round
/// d / detectors_per_round; a fault belongs to the earliest round it touches.
struct WindowLayout {
    std::uint32_t rounds = 1;
    std::size_t detectors_per_round = 0;
};

/// Overlapping (w, c) window decoder. Each window decodes w rounds and
/// commits the faults of its oldest c rounds; the committed correction's
/// syndrome is XORed into the stream before the next window. The last
/// window commits everything.
class WindowedDecoder {
public:
    WindowedDecoder(const DetectorModel& model, WindowLayout layout, std::uint32_t window, std::uint32_t commit,
                    const DecoderSpec& spec);

    struct Result {
        std::vector<std::vector<Index>> commits;  // one per window, global fault ids
        std::vector<Index> correction;
        std::vector<Index> residual_syndrome;
        DecodeOutcome summary;  // clusters aggregated over windows
    };

    [[nodiscard]] Result decode(std::span<const Index> syndrome) const;
    [[nodiscard]] std::size_t num_windows() const noexcept { return windows_.size(); }

private:
    struct Window {
        std::uint32_t first_round;
        std::uint32_t commit_end;  // faults with round < commit_end are committed
        std::vector<Index> detectors;
        std::vector<Index> faults;
        Decoder decoder;
    };

    const SparseBinaryMatrix* h_;
    WindowLayout layout_;
    std::vector<std::uint32_t> fault_round_;
    std::vector<Window> windows_;
};

// --- sampling ---------------------------------------------------------------

/// Order-independent per-shot seed derived from the run seed and shot index.
std::uint64_t shot_seed(std::uint64_t run_seed, std::uint64_t shot_index);

/// Independent Bernoulli flips; uses the top 53 bits of each draw so the
/// stream is identical on every standard library.
std::vector<Index> sample_iid_error(std::span<const double> priors, std::mt19937_64& rng);

// --- statistics -------------------------------------------------------------

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// 95% Wilson score interval for failures / shots.
Interval wilson_interval(std::size_t failures, std::size_t shots);
/// Rates whose binomial likelihood is within `ratio` of the maximum.
Interval likelihood_ratio_interval(std::size_t failures, std::size_t shots, double ratio = 1000.0);
/// p_L = 1 - (1 - P_L)^(1/N_c).
double per_cycle_rate(double total_rate, std::uint32_t cycles);
/// Average percolation cluster size on the degree-theta Bethe lattice,
/// (1 + p) / (1 - (theta - 1) p). Throws domain at or beyond the pole.
double bethe_avg_cluster(double p, double theta);
/// Largest perimeter of an s-cluster on a theta-bounded graph, (theta-2)s+2.
double bethe_perimeter(std::size_t s, double theta);
/// P[X >= k] for X ~ Binomial(n, q).
double binomial_upper_tail(std::size_t k, std::size_t n, double q);

// --- Monte Carlo --------------------------------------------------------------

struct ShotRecord {
    std::uint64_t shot = 0;
    std::uint64_t seed = 0;
    std::size_t error_weight = 0;
    std::size_t syndrome_weight = 0;
    bool bp_converged = false;
    bool lsd_invoked = false;
    std::size_t nu = 0;
    std::size_t kappa = 0;
    double kappa_alpha = 0.0;
    std::size_t optimal_nu = 0;
    std::size_t optimal_kappa = 0;
    double optimal_kappa_alpha = 0.0;
    bool satisfied = false;
    bool decode_error = false;
    bool logical_failure = false;
};

struct RunReport {
    double p = 0.0;
    std::size_t shots = 0;
    std::size_t failures = 0;
    std::size_t decode_errors = 0;
    std::size_t unsatisfied = 0;  // corrections with H·ê != s (decode errors excluded)
    double p_l = 0.0;
    Interval ci;
    Interval lr_band;
    double mean_nu = 0.0, mean_kappa = 0.0, mean_kappa_alpha = 0.0;
    double opt_mean_nu = 0.0, opt_mean_kappa = 0.0, opt_mean_kappa_alpha = 0.0;
};

struct WindowSpec {
    std::uint32_t window = 3;
    std::uint32_t commit = 1;
    WindowLayout layout;
};

struct MonteCarloOptions {
    std::size_t shots = 0;
    std::uint64_t seed = 0;
    std::uint32_t threads = 1;
    std::uint32_t cycles = 1;  // N_c for the per-cycle rate
    std::optional<WindowSpec> window;
    bool keep_records = false;
    bool progress = false;
};

struct RunResult {
    RunReport report;
    std::vector<ShotRecord> records;
};

using ModelFactory = std::function<DetectorModel(double p)>;

/// One report per grid point. Shot i of every point uses shot_seed(seed, i).
std::vector<RunResult> run_monte_carlo(const ModelFactory& factory, const DecoderSpec& spec,
                                       std::span<const double> p_grid, const MonteCarloOptions& options);

/// Single-model variant; p in the report is the mean prior.
RunResult run_monte_carlo(const DetectorModel& model, const DecoderSpec& spec, const MonteCarloOptions& options);

/// Decodes one shot and fills a record; never throws for decoder failures.
ShotRecord run_shot(const DetectorModel& model, const Decoder* decoder, const WindowedDecoder* windowed,
                    std::uint64_t run_seed, std::uint64_t shot_index);

struct StatSummary {
    double mean = 0.0;
    double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
};

struct ClusterStatistics {
    std::size_t samples = 0;          // shots where LSD ran
    std::size_t optimal_samples = 0;  // shots with a non-empty error
    StatSummary nu, kappa, kappa_alpha;
    StatSummary optimal_nu, optimal_kappa, optimal_kappa_alpha;
};

/// Means and nearest-rank quantiles of the per-shot cluster statistics.
ClusterStatistics cluster_stats(std::span<const ShotRecord> records);

// --- output -------------------------------------------------------------------

void write_csv_header(std::ostream& out, std::span<const std::string> config_echo);
void write_csv_row(std::ostream& out, const RunReport& report);
void write_shot_jsonl(std::ostream& out, double p, std::span<const ShotRecord> records);
void write_stats_csv(std::ostream& out, std::span<const std::string> config_echo, double p,
                     const ClusterStatistics& stats);

}  // namespace lsd
