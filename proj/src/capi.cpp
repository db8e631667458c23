#include "lsd/lsd.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>

#include "lsd/codes.hpp"
#include "lsd/error.hpp"
#include "lsd/experiments.hpp"
#include "lsd/model.hpp"

struct lsd_code {
    lsd::CssCode code;
};

struct lsd_model {
    lsd::DetectorModel model;
};

struct lsd_decoder {
    std::variant<lsd::Decoder, lsd::WindowedDecoder> impl;
};

struct lsd_records {
    std::vector<lsd::ShotRecord> records;
};

namespace {

thread_local std::string last_error;

lsd_status fail(lsd_status status, const char* message) {
    last_error = message;
    return status;
}

lsd_status status_of(lsd::ErrorCode code) {
    switch (code) {
        case lsd::ErrorCode::invalid_argument: return LSD_ERR_INVALID_ARGUMENT;
        case lsd::ErrorCode::parse: return LSD_ERR_PARSE;
        case lsd::ErrorCode::io: return LSD_ERR_IO;
        case lsd::ErrorCode::unsatisfiable: return LSD_ERR_UNSATISFIABLE;
        case lsd::ErrorCode::duplicate_column: return LSD_ERR_DUPLICATE_COLUMN;
        case lsd::ErrorCode::overlapping_rows: return LSD_ERR_OVERLAPPING_ROWS;
        case lsd::ErrorCode::not_in_image: return LSD_ERR_NOT_IN_IMAGE;
        case lsd::ErrorCode::domain: return LSD_ERR_DOMAIN;
    }
    return LSD_ERR_INTERNAL;
}

// Runs f, translating exceptions into status codes.
template <class F>
lsd_status guarded(F&& f) {
    try {
        return f();
    } catch (const lsd::Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(LSD_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(LSD_ERR_INTERNAL, e.what());
    }
}

#define LSD_REQUIRE(cond)                                                 \
    do {                                                                  \
        if (!(cond)) return fail(LSD_ERR_INVALID_ARGUMENT, #cond " failed"); \
    } while (0)

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

lsd::Side side_of(lsd_side side) { return side == LSD_SIDE_X ? lsd::Side::x : lsd::Side::z; }

std::optional<lsd::OsdMethod> osd_of(lsd_osd_kind kind, uint32_t order) {
    switch (kind) {
        case LSD_OSD_NONE: return std::nullopt;
        case LSD_OSD_0: return lsd::OsdMethod{lsd::OsdKind::osd0, order};
        case LSD_OSD_E: return lsd::OsdMethod::exhaustive(order);
        case LSD_OSD_CS: return lsd::OsdMethod::combination_sweep(order);
    }
    throw lsd::Error(lsd::ErrorCode::invalid_argument, "unknown OSD method");
}

lsd::DecoderSpec spec_of(const lsd_decoder_config& c) {
    lsd::DecoderSpec s;
    s.use_bp = c.use_bp != 0;
    s.bp.max_iterations = c.bp_iterations;
    s.bp.scaling_factor = c.bp_scaling;
    s.bp.schedule = c.bp_schedule == LSD_SCHEDULE_SERIAL ? lsd::BpSchedule::serial : lsd::BpSchedule::parallel;
    s.bp.clip = c.bp_clip;
    switch (c.post) {
        case LSD_POST_NONE: s.post = lsd::PostProcessor::none; break;
        case LSD_POST_LSD: s.post = lsd::PostProcessor::lsd; break;
        case LSD_POST_OSD: s.post = lsd::PostProcessor::osd; break;
        default: throw lsd::Error(lsd::ErrorCode::invalid_argument, "unknown post-processor");
    }
    s.lsd.mu = c.mu;
    if (c.mu_fraction >= 0.0) s.lsd.mu_fraction = c.mu_fraction;
    s.lsd.local_reprocessing = osd_of(c.local_osd, c.local_order);
    s.lsd.parallel = c.lsd_parallel != 0;
    if (s.post == lsd::PostProcessor::osd) {
        auto m = osd_of(c.osd, c.osd_order);
        if (!m) throw lsd::Error(lsd::ErrorCode::invalid_argument, "OSD post-processing needs a method");
        s.osd = *m;
    }
    s.validate();
    return s;
}

void fill_report(const lsd::RunReport& r, lsd_run_report* out) {
    out->p = r.p;
    out->shots = r.shots;
    out->failures = r.failures;
    out->decode_errors = r.decode_errors;
    out->unsatisfied = r.unsatisfied;
    out->p_l = r.p_l;
    out->ci_lo = r.ci.lo;
    out->ci_hi = r.ci.hi;
    out->lr_lo = r.lr_band.lo;
    out->lr_hi = r.lr_band.hi;
    out->mean_nu = r.mean_nu;
    out->mean_kappa = r.mean_kappa;
    out->mean_kappa_alpha = r.mean_kappa_alpha;
    out->opt_mean_nu = r.opt_mean_nu;
    out->opt_mean_kappa = r.opt_mean_kappa;
    out->opt_mean_kappa_alpha = r.opt_mean_kappa_alpha;
}

lsd::RunReport report_of(const lsd_run_report& r) {
    lsd::RunReport out;
    out.p = r.p;
    out.shots = r.shots;
    out.failures = r.failures;
    out.decode_errors = r.decode_errors;
    out.unsatisfied = r.unsatisfied;
    out.p_l = r.p_l;
    out.ci = {r.ci_lo, r.ci_hi};
    out.lr_band = {r.lr_lo, r.lr_hi};
    out.mean_nu = r.mean_nu;
    out.mean_kappa = r.mean_kappa;
    out.mean_kappa_alpha = r.mean_kappa_alpha;
    out.opt_mean_nu = r.opt_mean_nu;
    out.opt_mean_kappa = r.opt_mean_kappa;
    out.opt_mean_kappa_alpha = r.opt_mean_kappa_alpha;
    return out;
}

std::vector<std::string> echo_of(const char* const* echo, size_t n) {
    std::vector<std::string> lines;
    for (size_t i = 0; i < n; ++i) lines.emplace_back(echo[i] ? echo[i] : "");
    return lines;
}

lsd_status new_code(lsd::CssCode code, lsd_code** out) {
    *out = new lsd_code{std::move(code)};
    return LSD_OK;
}

lsd_status new_model(lsd::DetectorModel model, lsd_model** out) {
    *out = new lsd_model{std::move(model)};
    return LSD_OK;
}

}  // namespace

extern "C" {

const char* lsd_last_error(void) { return last_error.c_str(); }

const char* lsd_status_string(lsd_status status) {
    switch (status) {
        case LSD_OK: return "ok";
        case LSD_ERR_INVALID_ARGUMENT: return "invalid argument";
        case LSD_ERR_PARSE: return "parse error";
        case LSD_ERR_IO: return "I/O error";
        case LSD_ERR_UNSATISFIABLE: return "unsatisfiable";
        case LSD_ERR_DUPLICATE_COLUMN: return "duplicate column";
        case LSD_ERR_OVERLAPPING_ROWS: return "overlapping rows";
        case LSD_ERR_NOT_IN_IMAGE: return "not in image";
        case LSD_ERR_DOMAIN: return "domain error";
        case LSD_ERR_BUFFER_TOO_SMALL: return "buffer too small";
        case LSD_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void lsd_string_free(char* s) { std::free(s); }

lsd_status lsd_code_surface(uint32_t d, lsd_code** out) {
    LSD_REQUIRE(out);
    return guarded([&] { return new_code(lsd::surface_code(d), out); });
}

lsd_status lsd_code_repetition(uint32_t d, lsd_code** out) {
    LSD_REQUIRE(out);
    return guarded([&] { return new_code(lsd::repetition_code(d), out); });
}

lsd_status lsd_code_hgp_files(const char* h1_path, const char* h2_path, lsd_code** out) {
    LSD_REQUIRE(out && h1_path);
    return guarded([&] {
        const auto h1 = lsd::load_dense_matrix(h1_path);
        const auto h2 = h2_path ? lsd::load_dense_matrix(h2_path) : h1;
        return new_code(lsd::hypergraph_product(h1, h2), out);
    });
}

lsd_status lsd_code_bivariate_bicycle(uint32_t l, uint32_t m, const uint32_t* a, size_t a_terms, const uint32_t* b,
                                      size_t b_terms, lsd_code** out) {
    LSD_REQUIRE(out && (a || a_terms == 0) && (b || b_terms == 0));
    return guarded([&] {
        std::vector<lsd::Monomial> ma, mb;
        for (size_t i = 0; i < a_terms; ++i) ma.push_back({a[2 * i], a[2 * i + 1]});
        for (size_t i = 0; i < b_terms; ++i) mb.push_back({b[2 * i], b[2 * i + 1]});
        return new_code(lsd::bivariate_bicycle(l, m, ma, mb), out);
    });
}

lsd_status lsd_code_bb_file(const char* path, lsd_code** out) {
    LSD_REQUIRE(out && path);
    return guarded([&] { return new_code(lsd::bivariate_bicycle(lsd::load_bb_spec(path)), out); });
}

size_t lsd_code_n(const lsd_code* code) { return code ? code->code.n : 0; }
size_t lsd_code_k(const lsd_code* code) { return code ? code->code.k : 0; }

size_t lsd_code_checks(const lsd_code* code, lsd_side side) {
    if (!code) return 0;
    return side == LSD_SIDE_X ? code->code.hx.rows() : code->code.hz.rows();
}

int lsd_code_commutes(const lsd_code* code) {
    if (!code) return 0;
    return lsd::multiply(code->code.hx, code->code.hz.transpose()).nnz() == 0 ? 1 : 0;
}

void lsd_code_free(lsd_code* code) { delete code; }

lsd_status lsd_random_regular_write(size_t rows, size_t cols, uint32_t col_weight, uint32_t row_weight, uint64_t seed,
                                    int full_rank, const char* path) {
    LSD_REQUIRE(path);
    return guarded([&] {
        const auto m = lsd::random_regular_matrix(rows, cols, col_weight, row_weight, seed, full_rank != 0);
        std::ofstream f(path);
        if (!f) throw lsd::Error(lsd::ErrorCode::io, std::string("cannot open ") + path);
        lsd::write_dense_matrix(f, m);
        if (!f) throw lsd::Error(lsd::ErrorCode::io, std::string("cannot write ") + path);
        return LSD_OK;
    });
}

lsd_status lsd_model_load(const char* path, lsd_model** out) {
    LSD_REQUIRE(path && out);
    return guarded([&] { return new_model(lsd::load_model(path), out); });
}

lsd_status lsd_model_parse(const char* text, lsd_model** out) {
    LSD_REQUIRE(text && out);
    return guarded([&] {
        std::istringstream in(text);
        return new_model(lsd::parse_model(in), out);
    });
}

lsd_status lsd_model_save(const lsd_model* model, const char* path) {
    LSD_REQUIRE(model && path);
    return guarded([&] {
        lsd::save_model(model->model, path);
        return LSD_OK;
    });
}

lsd_status lsd_model_format(const lsd_model* model, char** text) {
    LSD_REQUIRE(model && text);
    return guarded([&] {
        std::ostringstream out;
        lsd::write_model(out, model->model);
        *text = copy_string(out.str());
        return LSD_OK;
    });
}

lsd_status lsd_model_code_capacity(const lsd_code* code, lsd_side side, double p, lsd_model** out) {
    LSD_REQUIRE(code && out);
    return guarded([&] { return new_model(lsd::code_capacity_model(code->code, side_of(side), p), out); });
}

lsd_status lsd_model_phenomenological(const lsd_code* code, lsd_side side, double p, uint32_t rounds,
                                      lsd_model** out) {
    LSD_REQUIRE(code && out);
    return guarded(
        [&] { return new_model(lsd::phenomenological_model(code->code, side_of(side), p, rounds), out); });
}

size_t lsd_model_num_detectors(const lsd_model* model) { return model ? model->model.num_detectors() : 0; }
size_t lsd_model_num_faults(const lsd_model* model) { return model ? model->model.num_faults() : 0; }
size_t lsd_model_num_observables(const lsd_model* model) { return model ? model->model.num_observables() : 0; }

double lsd_model_mean_prior(const lsd_model* model) {
    if (!model || model->model.priors.empty()) return 0.0;
    const auto& p = model->model.priors;
    return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
}

lsd_status lsd_model_check(const lsd_model* model, const uint32_t* correction, size_t correction_len,
                           const uint32_t* syndrome, size_t syndrome_len, int* ok) {
    LSD_REQUIRE(model && ok && (correction || correction_len == 0) && (syndrome || syndrome_len == 0));
    return guarded([&] {
        std::vector<lsd::Index> c(correction, correction + correction_len);
        std::vector<lsd::Index> s(syndrome, syndrome + syndrome_len);
        for (auto f : c) {
            if (f >= model->model.num_faults()) throw lsd::Error(lsd::ErrorCode::invalid_argument, "fault index out of range");
        }
        for (auto d : s) {
            if (d >= model->model.num_detectors()) {
                throw lsd::Error(lsd::ErrorCode::invalid_argument, "detector index out of range");
            }
        }
        std::sort(c.begin(), c.end());
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(c.begin(), c.end()) != c.end() || std::adjacent_find(s.begin(), s.end()) != s.end()) {
            throw lsd::Error(lsd::ErrorCode::invalid_argument, "repeated index");
        }
        *ok = lsd::satisfies_syndrome(model->model.h, c, s) ? 1 : 0;
        return LSD_OK;
    });
}

lsd_status lsd_model_sample_syndrome(const lsd_model* model, uint64_t seed, uint64_t shot, uint32_t* out,
                                     size_t capacity, size_t* len) {
    LSD_REQUIRE(model && len && (out || capacity == 0));
    return guarded([&] {
        std::mt19937_64 rng(lsd::shot_seed(seed, shot));
        const auto e = lsd::sample_iid_error(model->model.priors, rng);
        const auto s = model->model.h.multiply(e);
        *len = s.size();
        if (s.size() > capacity) return fail(LSD_ERR_BUFFER_TOO_SMALL, "syndrome buffer too small");
        std::copy(s.begin(), s.end(), out);
        return LSD_OK;
    });
}

void lsd_model_free(lsd_model* model) { delete model; }

void lsd_decoder_config_default(lsd_decoder_config* c) {
    if (!c) return;
    const lsd::DecoderSpec d;
    c->use_bp = 1;
    c->bp_iterations = d.bp.max_iterations;
    c->bp_scaling = d.bp.scaling_factor;
    c->bp_schedule = LSD_SCHEDULE_PARALLEL;
    c->bp_clip = d.bp.clip;
    c->post = LSD_POST_LSD;
    c->mu = 0;
    c->mu_fraction = -1.0;
    c->local_osd = LSD_OSD_NONE;
    c->local_order = 0;
    c->lsd_parallel = 0;
    c->osd = LSD_OSD_0;
    c->osd_order = 0;
}

lsd_status lsd_decoder_config_describe(const lsd_decoder_config* config, char** text) {
    LSD_REQUIRE(config && text);
    return guarded([&] {
        *text = copy_string(spec_of(*config).describe());
        return LSD_OK;
    });
}

lsd_status lsd_decoder_create(const lsd_model* model, const lsd_decoder_config* config, lsd_decoder** out) {
    LSD_REQUIRE(model && config && out);
    return guarded([&] {
        *out = new lsd_decoder{std::variant<lsd::Decoder, lsd::WindowedDecoder>(
            std::in_place_type<lsd::Decoder>, model->model, spec_of(*config))};
        return LSD_OK;
    });
}

lsd_status lsd_windowed_decoder_create(const lsd_model* model, const lsd_decoder_config* config, uint32_t rounds,
                                       size_t detectors_per_round, uint32_t window, uint32_t commit,
                                       lsd_decoder** out) {
    LSD_REQUIRE(model && config && out);
    return guarded([&] {
        *out = new lsd_decoder{std::variant<lsd::Decoder, lsd::WindowedDecoder>(
            std::in_place_type<lsd::WindowedDecoder>, model->model, lsd::WindowLayout{rounds, detectors_per_round},
            window, commit, spec_of(*config))};
        return LSD_OK;
    });
}

lsd_status lsd_decoder_decode(const lsd_decoder* decoder, const uint32_t* syndrome, size_t syndrome_len,
                              uint32_t* correction, size_t capacity, size_t* correction_len, lsd_decode_info* info) {
    LSD_REQUIRE(decoder && correction_len && (syndrome || syndrome_len == 0) && (correction || capacity == 0));
    return guarded([&] {
        std::vector<lsd::Index> s(syndrome, syndrome + syndrome_len);
        std::sort(s.begin(), s.end());
        const lsd::DecodeOutcome o = std::visit(
            [&](const auto& d) -> lsd::DecodeOutcome {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, lsd::Decoder>) {
                    return d.decode(s);
                } else {
                    return d.decode(s).summary;
                }
            },
            decoder->impl);
        if (!o.satisfied) return fail(LSD_ERR_UNSATISFIABLE, "decoder returned no valid correction");
        *correction_len = o.correction.size();
        if (info) {
            info->bp_converged = o.bp_converged;
            info->lsd_invoked = o.lsd_invoked;
            info->nu = o.nu;
            info->kappa = o.kappa;
            info->kappa_alpha = o.kappa_alpha;
        }
        if (o.correction.size() > capacity) return fail(LSD_ERR_BUFFER_TOO_SMALL, "correction buffer too small");
        std::copy(o.correction.begin(), o.correction.end(), correction);
        return LSD_OK;
    });
}

void lsd_decoder_free(lsd_decoder* decoder) { delete decoder; }

void lsd_run_options_default(lsd_run_options* o) {
    if (!o) return;
    *o = lsd_run_options{};
    o->threads = 1;
    o->cycles = 1;
}

lsd_status lsd_run(const lsd_model* model, const lsd_decoder_config* config, const lsd_run_options* options, double p,
                   lsd_run_report* report, lsd_records** records) {
    LSD_REQUIRE(model && config && options && report);
    return guarded([&] {
        lsd::MonteCarloOptions mc;
        mc.shots = options->shots;
        mc.seed = options->seed;
        mc.threads = options->threads;
        mc.cycles = options->cycles;
        mc.progress = options->progress != 0;
        mc.keep_records = options->keep_records != 0 && records != nullptr;
        if (options->window > 0) {
            mc.window = lsd::WindowSpec{options->window, options->commit,
                                        lsd::WindowLayout{options->rounds, options->detectors_per_round}};
        }
        const auto spec = spec_of(*config);
        const lsd::ModelFactory factory = [&](double) { return model->model; };
        const double grid[] = {p};
        auto results = lsd::run_monte_carlo(factory, spec, grid, mc);
        fill_report(results.front().report, report);
        if (records) *records = mc.keep_records ? new lsd_records{std::move(results.front().records)} : nullptr;
        return LSD_OK;
    });
}

size_t lsd_records_count(const lsd_records* records) { return records ? records->records.size() : 0; }

lsd_status lsd_records_format_jsonl(const lsd_records* records, double p, char** text) {
    LSD_REQUIRE(records && text);
    return guarded([&] {
        std::ostringstream out;
        lsd::write_shot_jsonl(out, p, records->records);
        *text = copy_string(out.str());
        return LSD_OK;
    });
}

lsd_status lsd_records_format_stats(const lsd_records* records, const char* const* echo, size_t echo_lines, double p,
                                    char** text) {
    LSD_REQUIRE(records && text && (echo || echo_lines == 0));
    return guarded([&] {
        std::ostringstream out;
        const auto lines = echo_of(echo, echo_lines);
        lsd::write_stats_csv(out, lines, p, lsd::cluster_stats(records->records));
        *text = copy_string(out.str());
        return LSD_OK;
    });
}

void lsd_records_free(lsd_records* records) { delete records; }

lsd_status lsd_format_csv_header(const char* const* echo, size_t echo_lines, char** text) {
    LSD_REQUIRE(text && (echo || echo_lines == 0));
    return guarded([&] {
        std::ostringstream out;
        const auto lines = echo_of(echo, echo_lines);
        lsd::write_csv_header(out, lines);
        *text = copy_string(out.str());
        return LSD_OK;
    });
}

lsd_status lsd_format_csv_row(const lsd_run_report* report, char** text) {
    LSD_REQUIRE(report && text);
    return guarded([&] {
        std::ostringstream out;
        lsd::write_csv_row(out, report_of(*report));
        *text = copy_string(out.str());
        return LSD_OK;
    });
}

lsd_status lsd_bethe_avg_cluster(double p, double theta, double* out) {
    LSD_REQUIRE(out);
    return guarded([&] {
        *out = lsd::bethe_avg_cluster(p, theta);
        return LSD_OK;
    });
}

lsd_status lsd_per_cycle_rate(double total_rate, uint32_t cycles, double* out) {
    LSD_REQUIRE(out);
    return guarded([&] {
        *out = lsd::per_cycle_rate(total_rate, cycles);
        return LSD_OK;
    });
}

lsd_status lsd_wilson_interval(size_t failures, size_t shots, double* lo, double* hi) {
    LSD_REQUIRE(lo && hi);
    if (failures > shots) return fail(LSD_ERR_INVALID_ARGUMENT, "failures exceed shots");
    const auto i = lsd::wilson_interval(failures, shots);
    *lo = i.lo;
    *hi = i.hi;
    return LSD_OK;
}

}  // extern "C"
