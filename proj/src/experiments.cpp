#include "lsd/experiments.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "lsd/error.hpp"

namespace lsd {

void DecoderSpec::validate() const {
    if (use_bp) bp.validate();
    lsd.validate();
    osd.validate();
    if (!use_bp && post == PostProcessor::none) {
        throw Error(ErrorCode::invalid_argument, "decoder pipeline is empty");
    }
}

namespace {

std::string osd_name(const OsdMethod& m) {
    switch (m.kind) {
        case OsdKind::osd0: return "osd0";
        case OsdKind::osd_e: return "osd_e(" + std::to_string(m.order) + ")";
        case OsdKind::osd_cs: return "osd_cs(" + std::to_string(m.order) + ")";
    }
    return "osd";
}

}  // namespace

std::string DecoderSpec::describe() const {
    std::ostringstream out;
    if (use_bp) {
        out << "bp(iters=" << bp.max_iterations << ",alpha=" << bp.scaling_factor
            << ",schedule=" << (bp.schedule == BpSchedule::parallel ? "parallel" : "serial") << ")";
    }
    if (post == PostProcessor::none) return out.str();
    if (use_bp) out << "+";
    if (post == PostProcessor::osd) {
        out << osd_name(osd);
    } else {
        out << "lsd(";
        if (lsd.mu_fraction) {
            out << "mu_fraction=" << *lsd.mu_fraction;
        } else {
            out << "mu=" << lsd.mu;
        }
        if (lsd.local_reprocessing) out << ",local=" << osd_name(*lsd.local_reprocessing);
        if (lsd.parallel) out << ",parallel";
        out << ")";
    }
    return out.str();
}

Decoder::Decoder(const DetectorModel& model, DecoderSpec spec)
    : h_(model.h), channel_(channel_llrs(model.priors)), spec_(std::move(spec)) {
    spec_.validate();
    if (model.priors.size() != h_.cols()) throw Error(ErrorCode::invalid_argument, "prior count does not match H");
    // Zero-probability faults become very unlikely rather than impossible so
    // that every downstream LLR stays finite.
    for (double& l : channel_) {
        if (!std::isfinite(l)) l = l > 0 ? 1e3 : -1e3;
    }
    if (spec_.use_bp) bp_.emplace(h_, channel_, spec_.bp);
}

DecodeOutcome Decoder::decode(std::span<const Index> syndrome) const {
    DecodeOutcome out;
    if (syndrome.empty()) {
        // BP converges immediately; nothing for a post-processor to do.
        out.bp_converged = bp_.has_value();
        out.satisfied = true;
        return out;
    }
    std::span<const double> llrs = channel_;
    BpResult bp;
    if (bp_) {
        bp = bp_->decode(syndrome);
        out.bp_converged = bp.converged;
        if (bp.converged || spec_.post == PostProcessor::none) {
            out.correction = std::move(bp.hard);
            out.satisfied = bp.converged;
            return out;
        }
        llrs = bp.llrs;
    }
    try {
        if (spec_.post == PostProcessor::lsd) {
            LsdResult r = lsd_decode(h_, syndrome, llrs, spec_.lsd);
            out.lsd_invoked = true;
            out.correction = std::move(r.correction);
            out.nu = r.nu;
            out.kappa = r.kappa;
            out.kappa_alpha = r.kappa_alpha;
            for (const auto& c : r.clusters) out.cluster_faults += c.size();
        } else {
            out.correction = osd_decode(h_, syndrome, llrs, spec_.osd);
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::not_in_image) throw Error(ErrorCode::unsatisfiable, e.what());
        throw;
    }
    out.satisfied = true;
    return out;
}

WindowedDecoder::WindowedDecoder(const DetectorModel& model, WindowLayout layout, std::uint32_t window,
                                 std::uint32_t commit, const DecoderSpec& spec)
    : h_(&model.h), layout_(layout) {
    if (commit == 0 || window < commit) {
        throw Error(ErrorCode::invalid_argument, "window sizes must satisfy window >= commit >= 1");
    }
    if (layout.rounds == 0 || layout.detectors_per_round == 0 ||
        static_cast<std::size_t>(layout.rounds) * layout.detectors_per_round != model.num_detectors()) {
        throw Error(ErrorCode::invalid_argument, "window layout does not match the detector count");
    }
    const auto no_round = std::numeric_limits<std::uint32_t>::max();
    fault_round_.assign(model.num_faults(), no_round);
    for (std::size_t f = 0; f < model.num_faults(); ++f) {
        auto col = model.h.col(f);
        if (!col.empty()) fault_round_[f] = static_cast<std::uint32_t>(col.front() / layout.detectors_per_round);
    }

    for (std::uint32_t start = 0;; start += commit) {
        const bool last = start + window >= layout.rounds;
        const std::uint32_t end = last ? layout.rounds : start + window;
        std::vector<Index> detectors;
        for (std::size_t d = start * layout.detectors_per_round; d < end * layout.detectors_per_round; ++d) {
            detectors.push_back(static_cast<Index>(d));
        }
        // Faults whose earliest detector lies in the window. Detectors beyond
        // the window are dropped from their columns.
        std::vector<Index> faults;
        std::vector<double> priors;
        for (std::size_t f = 0; f < model.num_faults(); ++f) {
            if (fault_round_[f] >= start && fault_round_[f] < end) {
                faults.push_back(static_cast<Index>(f));
                priors.push_back(model.priors[f]);
            }
        }
        DetectorModel sub{model.h.submatrix(detectors, faults), std::move(priors),
                          SparseBinaryMatrix(0, faults.size())};
        windows_.push_back(Window{start, last ? end : start + commit, std::move(detectors), std::move(faults),
                                  Decoder(sub, spec)});
        if (last) break;
    }
}

WindowedDecoder::Result WindowedDecoder::decode(std::span<const Index> syndrome) const {
    std::vector<std::uint8_t> stream(h_->rows(), 0);
    for (Index d : syndrome) {
        if (d >= stream.size()) throw Error(ErrorCode::invalid_argument, "detector index out of range");
        stream[d] ^= 1;
    }
    Result result;
    double cluster_faults = 0.0;
    for (const Window& w : windows_) {
        std::vector<Index> local;
        for (std::size_t i = 0; i < w.detectors.size(); ++i) {
            if (stream[w.detectors[i]]) local.push_back(static_cast<Index>(i));
        }
        DecodeOutcome o = w.decoder.decode(local);
        result.summary.bp_converged = result.summary.bp_converged || o.bp_converged;
        result.summary.lsd_invoked = result.summary.lsd_invoked || o.lsd_invoked;
        result.summary.nu += o.nu;
        result.summary.kappa = std::max(result.summary.kappa, o.kappa);
        cluster_faults += static_cast<double>(o.cluster_faults);

        std::vector<Index> committed;
        for (Index lf : o.correction) {
            const Index f = w.faults[lf];
            if (fault_round_[f] < w.commit_end) committed.push_back(f);
        }
        for (Index f : committed) {
            for (Index d : h_->col(f)) stream[d] ^= 1;
        }
        result.correction.insert(result.correction.end(), committed.begin(), committed.end());
        result.commits.push_back(std::move(committed));
    }
    std::sort(result.correction.begin(), result.correction.end());
    for (std::size_t d = 0; d < stream.size(); ++d) {
        if (stream[d]) result.residual_syndrome.push_back(static_cast<Index>(d));
    }
    result.summary.correction = result.correction;
    result.summary.satisfied = result.residual_syndrome.empty();
    result.summary.cluster_faults = static_cast<std::size_t>(cluster_faults);
    result.summary.kappa_alpha =
        result.summary.nu == 0 ? 0.0 : cluster_faults / static_cast<double>(result.summary.nu);
    return result;
}

std::uint64_t shot_seed(std::uint64_t run_seed, std::uint64_t shot_index) {
    // splitmix64 finalizer applied twice so nearby (seed, index) pairs decorrelate.
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(run_seed) ^ shot_index);
}

std::vector<Index> sample_iid_error(std::span<const double> priors, std::mt19937_64& rng) {
    std::vector<Index> error;
    for (std::size_t i = 0; i < priors.size(); ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u < priors[i]) error.push_back(static_cast<Index>(i));
    }
    return error;
}

Interval wilson_interval(std::size_t failures, std::size_t shots) {
    if (shots == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double n = static_cast<double>(shots);
    const double p = static_cast<double>(failures) / n;
    const double denom = 1.0 + z * z / n;
    const double centre = (p + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    // At f = 0 or f = n the bounds are exactly 0 or 1; rounding must not
    // push them past the estimate.
    return {failures == 0 ? 0.0 : std::min(p, centre - half), failures == shots ? 1.0 : std::max(p, centre + half)};
}

Interval likelihood_ratio_interval(std::size_t failures, std::size_t shots, double ratio) {
    if (shots == 0) return {0.0, 1.0};
    if (!(ratio > 1.0)) throw Error(ErrorCode::invalid_argument, "likelihood ratio must exceed 1");
    const double k = static_cast<double>(failures), n = static_cast<double>(shots);
    auto loglik = [&](double q) {
        double v = 0.0;
        if (k > 0) v += k * std::log(q);
        if (n - k > 0) v += (n - k) * std::log1p(-q);
        return v;
    };
    const double phat = k / n;
    const double cutoff = loglik(phat) - std::log(ratio);
    // loglik is unimodal, so each side is a monotone root search.
    auto bisect = [&](double inside, double outside) {
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (inside + outside);
            (loglik(mid) >= cutoff ? inside : outside) = mid;
        }
        return inside;
    };
    const double lo = failures == 0 ? 0.0 : bisect(phat, 0.0);
    const double hi = failures == shots ? 1.0 : bisect(phat, 1.0);
    return {lo, hi};
}

double per_cycle_rate(double total_rate, std::uint32_t cycles) {
    if (cycles == 0) throw Error(ErrorCode::invalid_argument, "cycle count must be positive");
    if (!(total_rate >= 0.0 && total_rate <= 1.0)) throw Error(ErrorCode::domain, "rate must lie in [0, 1]");
    if (cycles == 1) return total_rate;
    return -std::expm1(std::log1p(-total_rate) / static_cast<double>(cycles));
}

double bethe_avg_cluster(double p, double theta) {
    if (!(theta >= 2.0)) throw Error(ErrorCode::domain, "degree must be at least 2");
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::domain, "probability must lie in [0, 1]");
    const double denom = 1.0 - (theta - 1.0) * p;
    if (denom <= 0.0) throw Error(ErrorCode::domain, "probability at or above the percolation threshold");
    return (1.0 + p) / denom;
}

double bethe_perimeter(std::size_t s, double theta) {
    return (theta - 2.0) * static_cast<double>(s) + 2.0;
}

double binomial_upper_tail(std::size_t k, std::size_t n, double q) {
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    if (q <= 0.0) return 0.0;
    if (q >= 1.0) return 1.0;
    const double lq = std::log(q), l1q = std::log1p(-q);
    double total = 0.0;
    for (std::size_t i = k; i <= n; ++i) {
        const double di = static_cast<double>(i), dn = static_cast<double>(n);
        const double lp = std::lgamma(dn + 1) - std::lgamma(di + 1) - std::lgamma(dn - di + 1) + di * lq +
                          (dn - di) * l1q;
        total += std::exp(lp);
    }
    return std::min(1.0, total);
}

ShotRecord run_shot(const DetectorModel& model, const Decoder* decoder, const WindowedDecoder* windowed,
                    std::uint64_t run_seed, std::uint64_t shot_index) {
    ShotRecord rec;
    rec.shot = shot_index;
    rec.seed = shot_seed(run_seed, shot_index);
    std::mt19937_64 rng(rec.seed);
    const std::vector<Index> error = sample_iid_error(model.priors, rng);
    const std::vector<Index> syndrome = model.h.multiply(error);
    rec.error_weight = error.size();
    rec.syndrome_weight = syndrome.size();

    const auto clusters = error_clusters(model.h, error);
    rec.optimal_nu = clusters.size();
    for (const auto& c : clusters) rec.optimal_kappa = std::max(rec.optimal_kappa, c.size());
    rec.optimal_kappa_alpha =
        clusters.empty() ? 0.0 : static_cast<double>(error.size()) / static_cast<double>(clusters.size());

    DecodeOutcome out;
    try {
        out = windowed ? windowed->decode(syndrome).summary : decoder->decode(syndrome);
    } catch (const Error&) {
        rec.decode_error = true;
        rec.logical_failure = true;
        return rec;
    }
    rec.bp_converged = out.bp_converged;
    rec.lsd_invoked = out.lsd_invoked;
    rec.nu = out.nu;
    rec.kappa = out.kappa;
    rec.kappa_alpha = out.kappa_alpha;
    rec.satisfied = satisfies_syndrome(model.h, out.correction, syndrome);
    const auto residual = xor_support(error, out.correction);
    rec.logical_failure = !rec.satisfied || !model.observables.multiply(residual).empty();
    return rec;
}

namespace {

RunReport summarize(double p, std::span<const ShotRecord> records, std::uint32_t cycles) {
    RunReport r;
    r.p = p;
    r.shots = records.size();
    std::size_t lsd_runs = 0, nonempty = 0;
    for (const auto& s : records) {
        r.failures += s.logical_failure;
        r.decode_errors += s.decode_error;
        r.unsatisfied += !s.decode_error && !s.satisfied;
        if (s.lsd_invoked) {
            ++lsd_runs;
            r.mean_nu += static_cast<double>(s.nu);
            r.mean_kappa += static_cast<double>(s.kappa);
            r.mean_kappa_alpha += s.kappa_alpha;
        }
        if (s.error_weight > 0) {
            ++nonempty;
            r.opt_mean_nu += static_cast<double>(s.optimal_nu);
            r.opt_mean_kappa += static_cast<double>(s.optimal_kappa);
            r.opt_mean_kappa_alpha += s.optimal_kappa_alpha;
        }
    }
    if (lsd_runs > 0) {
        r.mean_nu /= static_cast<double>(lsd_runs);
        r.mean_kappa /= static_cast<double>(lsd_runs);
        r.mean_kappa_alpha /= static_cast<double>(lsd_runs);
    }
    if (nonempty > 0) {
        r.opt_mean_nu /= static_cast<double>(nonempty);
        r.opt_mean_kappa /= static_cast<double>(nonempty);
        r.opt_mean_kappa_alpha /= static_cast<double>(nonempty);
    }
    // The per-cycle map is monotone, so interval endpoints transform directly.
    const double total = r.shots ? static_cast<double>(r.failures) / static_cast<double>(r.shots) : 0.0;
    const Interval ci = wilson_interval(r.failures, r.shots);
    const Interval lr = likelihood_ratio_interval(r.failures, r.shots);
    r.p_l = per_cycle_rate(total, cycles);
    r.ci = {per_cycle_rate(ci.lo, cycles), per_cycle_rate(ci.hi, cycles)};
    r.lr_band = {per_cycle_rate(lr.lo, cycles), per_cycle_rate(lr.hi, cycles)};
    return r;
}

RunResult run_point(const DetectorModel& model, double p, const DecoderSpec& spec, const MonteCarloOptions& options) {
    model.validate();
    std::optional<Decoder> decoder;
    std::optional<WindowedDecoder> windowed;
    if (options.window) {
        windowed.emplace(model, options.window->layout, options.window->window, options.window->commit, spec);
    } else {
        decoder.emplace(model, spec);
    }
    std::vector<ShotRecord> records(options.shots);
    std::atomic<std::size_t> done{0};
    const std::size_t report_every = std::max<std::size_t>(1, options.shots / 10);
    auto body = [&](const tbb::blocked_range<std::size_t>& range) {
        for (std::size_t i = range.begin(); i != range.end(); ++i) {
            records[i] = run_shot(model, decoder ? &*decoder : nullptr, windowed ? &*windowed : nullptr, options.seed,
                                  i);
            if (options.progress) {
                const std::size_t n = ++done;
                if (n % report_every == 0) std::fprintf(stderr, "p=%g: %zu/%zu shots\n", p, n, options.shots);
            }
        }
    };
    if (options.threads <= 1) {
        body(tbb::blocked_range<std::size_t>(0, options.shots));
    } else {
        tbb::task_arena arena(static_cast<int>(options.threads));
        arena.execute([&] { tbb::parallel_for(tbb::blocked_range<std::size_t>(0, options.shots, 16), body); });
    }
    RunResult result;
    result.report = summarize(p, records, options.cycles);
    if (options.keep_records) result.records = std::move(records);
    return result;
}

void check_options(const MonteCarloOptions& options) {
    if (options.shots == 0) throw Error(ErrorCode::invalid_argument, "shot count must be positive");
    if (options.cycles == 0) throw Error(ErrorCode::invalid_argument, "cycle count must be positive");
}

}  // namespace

std::vector<RunResult> run_monte_carlo(const ModelFactory& factory, const DecoderSpec& spec,
                                       std::span<const double> p_grid, const MonteCarloOptions& options) {
    check_options(options);
    spec.validate();
    std::vector<RunResult> out;
    out.reserve(p_grid.size());
    for (double p : p_grid) out.push_back(run_point(factory(p), p, spec, options));
    return out;
}

RunResult run_monte_carlo(const DetectorModel& model, const DecoderSpec& spec, const MonteCarloOptions& options) {
    check_options(options);
    spec.validate();
    const double mean_prior =
        model.priors.empty() ? 0.0
                             : std::accumulate(model.priors.begin(), model.priors.end(), 0.0) /
                                   static_cast<double>(model.priors.size());
    return run_point(model, mean_prior, spec, options);
}

namespace {

StatSummary summarize_values(std::vector<double> v) {
    StatSummary s;
    if (v.empty()) return s;
    std::sort(v.begin(), v.end());
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    auto rank = [&](double q) {
        const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
        return v[std::clamp<std::size_t>(idx, 1, v.size()) - 1];
    };
    s.q05 = rank(0.05);
    s.q25 = rank(0.25);
    s.q50 = rank(0.50);
    s.q75 = rank(0.75);
    s.q95 = rank(0.95);
    return s;
}

}  // namespace

ClusterStatistics cluster_stats(std::span<const ShotRecord> records) {
    std::vector<double> nu, kappa, ka, onu, okappa, oka;
    for (const auto& r : records) {
        if (r.lsd_invoked) {
            nu.push_back(static_cast<double>(r.nu));
            kappa.push_back(static_cast<double>(r.kappa));
            ka.push_back(r.kappa_alpha);
        }
        if (r.error_weight > 0) {
            onu.push_back(static_cast<double>(r.optimal_nu));
            okappa.push_back(static_cast<double>(r.optimal_kappa));
            oka.push_back(r.optimal_kappa_alpha);
        }
    }
    ClusterStatistics s;
    s.samples = nu.size();
    s.optimal_samples = onu.size();
    s.nu = summarize_values(std::move(nu));
    s.kappa = summarize_values(std::move(kappa));
    s.kappa_alpha = summarize_values(std::move(ka));
    s.optimal_nu = summarize_values(std::move(onu));
    s.optimal_kappa = summarize_values(std::move(okappa));
    s.optimal_kappa_alpha = summarize_values(std::move(oka));
    return s;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

void write_csv_header(std::ostream& out, std::span<const std::string> config_echo) {
    for (const auto& line : config_echo) out << "# " << line << '\n';
    out << "p,shots,failures,p_l,ci_lo,ci_hi,mean_nu,mean_kappa,mean_kappa_alpha,"
           "opt_mean_nu,opt_mean_kappa,opt_mean_kappa_alpha,decode_errors,lr_lo,lr_hi\n";
}

void write_csv_row(std::ostream& out, const RunReport& r) {
    out << fmt(r.p) << ',' << r.shots << ',' << r.failures << ',' << fmt(r.p_l) << ',' << fmt(r.ci.lo) << ','
        << fmt(r.ci.hi) << ',' << fmt(r.mean_nu) << ',' << fmt(r.mean_kappa) << ',' << fmt(r.mean_kappa_alpha)
        << ',' << fmt(r.opt_mean_nu) << ',' << fmt(r.opt_mean_kappa) << ',' << fmt(r.opt_mean_kappa_alpha) << ','
        << r.decode_errors << ',' << fmt(r.lr_band.lo) << ',' << fmt(r.lr_band.hi) << '\n';
}

void write_shot_jsonl(std::ostream& out, double p, std::span<const ShotRecord> records) {
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["p"] = p;
        j["shot"] = r.shot;
        j["seed"] = r.seed;
        j["error_weight"] = r.error_weight;
        j["syndrome_weight"] = r.syndrome_weight;
        j["bp_converged"] = r.bp_converged;
        j["lsd_invoked"] = r.lsd_invoked;
        j["nu"] = r.nu;
        j["kappa"] = r.kappa;
        j["kappa_alpha"] = r.kappa_alpha;
        j["optimal_nu"] = r.optimal_nu;
        j["optimal_kappa"] = r.optimal_kappa;
        j["optimal_kappa_alpha"] = r.optimal_kappa_alpha;
        j["satisfied"] = r.satisfied;
        j["decode_error"] = r.decode_error;
        j["logical_failure"] = r.logical_failure;
        out << j.dump() << '\n';
    }
}

void write_stats_csv(std::ostream& out, std::span<const std::string> config_echo, double p,
                     const ClusterStatistics& s) {
    for (const auto& line : config_echo) out << "# " << line << '\n';
    out << "p,source,statistic,samples,mean,q05,q25,q50,q75,q95\n";
    auto row = [&](const char* source, const char* name, std::size_t n, const StatSummary& v) {
        out << fmt(p) << ',' << source << ',' << name << ',' << n << ',' << fmt(v.mean) << ',' << fmt(v.q05) << ','
            << fmt(v.q25) << ',' << fmt(v.q50) << ',' << fmt(v.q75) << ',' << fmt(v.q95) << '\n';
    };
    row("lsd", "nu", s.samples, s.nu);
    row("lsd", "kappa", s.samples, s.kappa);
    row("lsd", "kappa_alpha", s.samples, s.kappa_alpha);
    row("optimal", "nu", s.optimal_samples, s.optimal_nu);
    row("optimal", "kappa", s.optimal_samples, s.optimal_kappa);
    row("optimal", "kappa_alpha", s.optimal_samples, s.optimal_kappa_alpha);
}

}  // namespace lsd
