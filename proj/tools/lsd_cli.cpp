// lsd: batch front end. Talks to the library only through lsd.h.
//
// Exit codes: 0 success, 1 usage, 2 decode failure, 3 I/O (including
// malformed input files).

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lsd/lsd.h"

namespace {

constexpr int exit_usage = 1;
constexpr int exit_decode = 2;
constexpr int exit_io = 3;

struct Failure {
    int code;
    std::string message;
};

int exit_code_of(lsd_status s) {
    switch (s) {
        case LSD_ERR_PARSE:
        case LSD_ERR_IO: return exit_io;
        case LSD_ERR_UNSATISFIABLE:
        case LSD_ERR_NOT_IN_IMAGE: return exit_decode;
        default: return exit_usage;
    }
}

void check(lsd_status s) {
    if (s != LSD_OK) throw Failure{exit_code_of(s), lsd_last_error()};
}

struct CodeFree {
    void operator()(lsd_code* c) const { lsd_code_free(c); }
};
struct ModelFree {
    void operator()(lsd_model* m) const { lsd_model_free(m); }
};
struct DecoderFree {
    void operator()(lsd_decoder* d) const { lsd_decoder_free(d); }
};
struct RecordsFree {
    void operator()(lsd_records* r) const { lsd_records_free(r); }
};
using CodePtr = std::unique_ptr<lsd_code, CodeFree>;
using ModelPtr = std::unique_ptr<lsd_model, ModelFree>;
using DecoderPtr = std::unique_ptr<lsd_decoder, DecoderFree>;
using RecordsPtr = std::unique_ptr<lsd_records, RecordsFree>;

std::string take(char* s) {
    std::string out(s ? s : "");
    lsd_string_free(s);
    return out;
}

// "-" or empty means standard output.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_.open(path, std::ios::binary);
        if (!file_) throw Failure{exit_io, "cannot open " + path + " for writing"};
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    void finish(const std::string& what) {
        stream().flush();
        if (!stream()) throw Failure{exit_io, "write failed: " + what};
    }

private:
    std::ofstream file_;
};

// One support per line; blank lines are empty supports.
std::vector<std::vector<std::uint32_t>> read_supports(const std::string& path, std::size_t bound,
                                                      const char* what) {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (!path.empty() && path != "-") {
        file.open(path);
        if (!file) throw Failure{exit_io, "cannot open " + path};
        in = &file;
    }
    std::vector<std::vector<std::uint32_t>> out;
    std::size_t line_no = 0;
    for (std::string line; std::getline(*in, line);) {
        ++line_no;
        std::vector<std::uint32_t> support;
        std::istringstream tokens(line);
        for (std::string tok; tokens >> tok;) {
            std::uint32_t v = 0;
            const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || end != tok.data() + tok.size()) {
                throw Failure{exit_io, path + ":" + std::to_string(line_no) + ": bad " + what + " index '" + tok + "'"};
            }
            if (v >= bound) {
                throw Failure{exit_io, path + ":" + std::to_string(line_no) + ": " + what + " index " + tok +
                                           " out of range (" + std::to_string(bound) + ")"};
            }
            support.push_back(v);
        }
        out.push_back(std::move(support));
    }
    if (in->bad()) throw Failure{exit_io, "read failed: " + path};
    return out;
}

// ---- model sources -------------------------------------------------------

struct ModelSource {
    std::string model_path;
    std::string code;
    std::uint32_t d = 3;
    std::string side = "z";
    std::string seed_file;
    std::string seed_file2;
    std::string bb_config;
    std::uint32_t rounds = 1;
};

void add_code_flags(CLI::App* app, ModelSource& src) {
    app->add_option("--d", src.d, "Code distance (surface, repetition)");
    app->add_option("--side", src.side, "Check side to decode")->check(CLI::IsMember({"x", "z"}));
    app->add_option("--seed-file", src.seed_file, "Dense seed matrix for hgp");
    app->add_option("--seed-file2", src.seed_file2, "Second hgp seed (defaults to the first)");
    app->add_option("--config", src.bb_config, "Bivariate bicycle config file");
    app->add_option("--rounds", src.rounds, "Syndrome rounds; >1 gives the phenomenological model")
        ->check(CLI::PositiveNumber);
}

void add_model_source(CLI::App* app, ModelSource& src) {
    auto* model = app->add_option("--model", src.model_path, "Detector model file");
    auto* code = app->add_option("--code", src.code, "Generate the model from a code family")
                     ->check(CLI::IsMember({"surface", "repetition", "hgp", "bb"}));
    model->excludes(code);
    add_code_flags(app, src);
}

lsd_side side_of(const ModelSource& src) {
    // The repetition code only has x-type checks.
    if (src.code == "repetition") return LSD_SIDE_X;
    return src.side == "x" ? LSD_SIDE_X : LSD_SIDE_Z;
}

CodePtr make_code(const ModelSource& src) {
    lsd_code* c = nullptr;
    if (src.code == "surface") {
        check(lsd_code_surface(src.d, &c));
    } else if (src.code == "repetition") {
        check(lsd_code_repetition(src.d, &c));
    } else if (src.code == "hgp") {
        if (src.seed_file.empty()) throw Failure{exit_usage, "hgp needs --seed-file"};
        check(lsd_code_hgp_files(src.seed_file.c_str(), src.seed_file2.empty() ? nullptr : src.seed_file2.c_str(), &c));
    } else if (src.code == "bb") {
        if (src.bb_config.empty()) throw Failure{exit_usage, "bb needs --config"};
        check(lsd_code_bb_file(src.bb_config.c_str(), &c));
    } else {
        throw Failure{exit_usage, "one of --model or --code is required"};
    }
    return CodePtr(c);
}

ModelPtr make_model(const ModelSource& src, const lsd_code* code, double p) {
    lsd_model* m = nullptr;
    if (!src.model_path.empty()) {
        check(lsd_model_load(src.model_path.c_str(), &m));
    } else if (src.rounds > 1) {
        check(lsd_model_phenomenological(code, side_of(src), p, src.rounds, &m));
    } else {
        check(lsd_model_code_capacity(code, side_of(src), p, &m));
    }
    return ModelPtr(m);
}

std::string describe_source(const ModelSource& src) {
    if (!src.model_path.empty()) return "model " + src.model_path;
    std::string s = "code " + src.code;
    if (src.code == "surface" || src.code == "repetition") s += " d=" + std::to_string(src.d);
    if (src.code == "hgp") s += " seed=" + src.seed_file + (src.seed_file2.empty() ? "" : "," + src.seed_file2);
    if (src.code == "bb") s += " config=" + src.bb_config;
    s += std::string(" side=") + (side_of(src) == LSD_SIDE_X ? "x" : "z");
    s += src.rounds > 1 ? " noise=phenomenological rounds=" + std::to_string(src.rounds) : " noise=code_capacity";
    return s;
}

// ---- decoder flags -------------------------------------------------------

struct DecoderFlags {
    lsd_decoder_config config{};
    bool no_bp = false;
    std::string schedule = "parallel";
    std::string post = "lsd";
    std::string local_osd = "none";
    std::string osd = "osd0";
    double mu_fraction = -1.0;
    bool parallel = false;

    DecoderFlags() { lsd_decoder_config_default(&config); }
};

void add_decoder_flags(CLI::App* app, DecoderFlags& f) {
    app->add_flag("--no-bp", f.no_bp, "Skip BP and post-process the raw syndrome");
    app->add_option("--bp-iters", f.config.bp_iterations, "BP iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--bp-scaling", f.config.bp_scaling, "Min-sum scaling factor");
    app->add_option("--bp-schedule", f.schedule, "BP schedule")->check(CLI::IsMember({"parallel", "serial"}));
    app->add_option("--bp-clip", f.config.bp_clip, "LLR clip magnitude");
    app->add_option("--post", f.post, "Post-processor when BP fails")->check(CLI::IsMember({"lsd", "osd", "none"}));
    app->add_option("--mu", f.config.mu, "LSD extra growth rounds");
    app->add_option("--mu-fraction", f.mu_fraction, "LSD growth budget as a fraction of all faults");
    app->add_option("--local-osd", f.local_osd, "OSD inside each LSD cluster")
        ->check(CLI::IsMember({"none", "osd0", "osd_e", "osd_cs"}));
    app->add_option("--local-order", f.config.local_order, "Order of the local OSD");
    app->add_flag("--parallel-lsd", f.parallel, "Grow clusters concurrently");
    app->add_option("--osd", f.osd, "Global OSD method for --post osd")
        ->check(CLI::IsMember({"osd0", "osd_e", "osd_cs"}));
    app->add_option("--osd-order", f.config.osd_order, "Global OSD order");
}

lsd_osd_kind osd_kind_of(const std::string& s) {
    if (s == "osd0") return LSD_OSD_0;
    if (s == "osd_e") return LSD_OSD_E;
    if (s == "osd_cs") return LSD_OSD_CS;
    return LSD_OSD_NONE;
}

lsd_decoder_config config_of(const DecoderFlags& f) {
    lsd_decoder_config c = f.config;
    c.use_bp = f.no_bp ? 0 : 1;
    c.bp_schedule = f.schedule == "serial" ? LSD_SCHEDULE_SERIAL : LSD_SCHEDULE_PARALLEL;
    c.post = f.post == "osd" ? LSD_POST_OSD : f.post == "none" ? LSD_POST_NONE : LSD_POST_LSD;
    c.mu_fraction = f.mu_fraction;
    c.local_osd = osd_kind_of(f.local_osd);
    c.lsd_parallel = f.parallel ? 1 : 0;
    c.osd = osd_kind_of(f.osd);
    return c;
}

std::string describe(const lsd_decoder_config& c) {
    char* text = nullptr;
    check(lsd_decoder_config_describe(&c, &text));
    return take(text);
}

struct WindowFlags {
    std::uint32_t window = 0;
    std::uint32_t commit = 1;
    std::size_t detectors_per_round = 0;
};

void add_window_flags(CLI::App* app, WindowFlags& w) {
    app->add_option("--window", w.window, "Overlapping window size in rounds (0: global decoding)");
    app->add_option("--commit", w.commit, "Rounds committed per window")->check(CLI::PositiveNumber);
    app->add_option("--detectors-per-round", w.detectors_per_round,
                    "Detectors per round (needed with --model and --window)");
}

// Detector layout for windowed decoding; rounds come from --rounds.
std::size_t detectors_per_round(const ModelSource& src, const WindowFlags& w, const lsd_code* code,
                                const lsd_model* model) {
    if (w.detectors_per_round > 0) return w.detectors_per_round;
    if (code) return lsd_code_checks(code, side_of(src));
    if (src.rounds > 0) return lsd_model_num_detectors(model) / src.rounds;
    return 0;
}

// ---- gen -----------------------------------------------------------------

struct GenArgs {
    ModelSource src;
    double p = 0.01;
    std::string out;
    // regular
    std::size_t rows = 0, cols = 0;
    std::uint32_t col_weight = 3, row_weight = 4;
    std::uint64_t seed = 1;
    bool full_rank = false;
    // syndromes
    std::size_t shots = 0;
};

int gen_model(const GenArgs& a) {
    const auto code = make_code(a.src);
    const auto model = make_model(a.src, code.get(), a.p);
    char* text = nullptr;
    check(lsd_model_format(model.get(), &text));
    Output out(a.out);
    out.stream() << take(text);
    out.finish(a.out);
    std::cerr << a.src.code << ": n=" << lsd_code_n(code.get()) << " k=" << lsd_code_k(code.get())
              << " detectors=" << lsd_model_num_detectors(model.get())
              << " faults=" << lsd_model_num_faults(model.get()) << '\n';
    return 0;
}

int gen_regular(const GenArgs& a) {
    check(lsd_random_regular_write(a.rows, a.cols, a.col_weight, a.row_weight, a.seed, a.full_rank ? 1 : 0,
                                   a.out.c_str()));
    return 0;
}

int gen_syndromes(const GenArgs& a) {
    lsd_model* raw = nullptr;
    check(lsd_model_load(a.src.model_path.c_str(), &raw));
    const ModelPtr model(raw);
    std::vector<std::uint32_t> buf(lsd_model_num_detectors(model.get()));
    Output out(a.out);
    for (std::size_t shot = 0; shot < a.shots; ++shot) {
        std::size_t len = 0;
        check(lsd_model_sample_syndrome(model.get(), a.seed, shot, buf.data(), buf.size(), &len));
        for (std::size_t i = 0; i < len; ++i) out.stream() << (i ? " " : "") << buf[i];
        out.stream() << '\n';
    }
    out.finish(a.out);
    return 0;
}

// ---- decode / verify -----------------------------------------------------

struct DecodeArgs {
    std::string model_path;
    std::string syndromes = "-";
    std::string corrections;
    std::string out;
    DecoderFlags decoder;
    WindowFlags window;
    std::uint32_t rounds = 1;
};

ModelPtr load_model(const std::string& path) {
    lsd_model* m = nullptr;
    check(lsd_model_load(path.c_str(), &m));
    return ModelPtr(m);
}

int run_decode(const DecodeArgs& a) {
    const auto model = load_model(a.model_path);
    const auto config = config_of(a.decoder);
    lsd_decoder* raw = nullptr;
    if (a.window.window > 0) {
        ModelSource src;
        src.rounds = a.rounds;
        const auto dpr = detectors_per_round(src, a.window, nullptr, model.get());
        check(lsd_windowed_decoder_create(model.get(), &config, a.rounds, dpr, a.window.window, a.window.commit, &raw));
    } else {
        check(lsd_decoder_create(model.get(), &config, &raw));
    }
    const DecoderPtr decoder(raw);
    const auto shots = read_supports(a.syndromes, lsd_model_num_detectors(model.get()), "detector");
    std::vector<std::uint32_t> buf(lsd_model_num_faults(model.get()));
    Output out(a.out);
    int status = 0;
    for (const auto& s : shots) {
        std::size_t len = 0;
        const lsd_status st = lsd_decoder_decode(decoder.get(), s.data(), s.size(), buf.data(), buf.size(), &len, nullptr);
        if (st == LSD_ERR_UNSATISFIABLE) {
            out.stream() << "ERROR unsatisfiable\n";
            status = exit_decode;
            continue;
        }
        check(st);
        for (std::size_t i = 0; i < len; ++i) out.stream() << (i ? " " : "") << buf[i];
        out.stream() << '\n';
    }
    out.finish(a.out);
    return status;
}

int run_verify(const DecodeArgs& a) {
    const auto model = load_model(a.model_path);
    const auto syndromes = read_supports(a.syndromes, lsd_model_num_detectors(model.get()), "detector");
    std::ifstream in(a.corrections);
    if (!in) throw Failure{exit_io, "cannot open " + a.corrections};
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    if (lines.size() != syndromes.size()) {
        throw Failure{exit_io, "line count mismatch: " + std::to_string(syndromes.size()) + " syndromes, " +
                                   std::to_string(lines.size()) + " corrections"};
    }
    std::size_t bad = 0;
    const std::size_t faults = lsd_model_num_faults(model.get());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].rfind("ERROR", 0) == 0) {
            std::cout << "shot " << i << ": no correction (" << lines[i] << ")\n";
            ++bad;
            continue;
        }
        std::vector<std::uint32_t> e;
        std::istringstream tokens(lines[i]);
        for (std::string tok; tokens >> tok;) {
            std::uint32_t v = 0;
            const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || end != tok.data() + tok.size() || v >= faults) {
                throw Failure{exit_io, a.corrections + ":" + std::to_string(i + 1) + ": bad fault index '" + tok + "'"};
            }
            e.push_back(v);
        }
        int ok = 0;
        check(lsd_model_check(model.get(), e.data(), e.size(), syndromes[i].data(), syndromes[i].size(), &ok));
        if (!ok) {
            std::cout << "shot " << i << ": correction does not reproduce the syndrome\n";
            ++bad;
        }
    }
    std::cout << (bad ? "FAILED " : "OK ") << lines.size() - bad << '/' << lines.size() << '\n';
    return bad ? exit_decode : 0;
}

// ---- sweep / stats -------------------------------------------------------

struct SweepArgs {
    ModelSource src;
    DecoderFlags decoder;
    WindowFlags window;
    std::vector<double> p;
    std::size_t shots = 1000;
    std::uint64_t seed = 0;
    std::uint32_t threads = 1;
    std::uint32_t cycles = 0;
    std::string out;
    std::string jsonl;
    bool progress = false;
};

std::vector<std::string> echo_of(const char* command, const SweepArgs& a, const lsd_decoder_config& config,
                                 std::uint32_t cycles) {
    std::vector<std::string> echo{std::string("lsd ") + command, describe_source(a.src), "decoder " + describe(config),
                                  "shots=" + std::to_string(a.shots) + " seed=" + std::to_string(a.seed) +
                                      " cycles=" + std::to_string(cycles)};
    if (a.window.window > 0) {
        echo.push_back("window=" + std::to_string(a.window.window) + " commit=" + std::to_string(a.window.commit));
    }
    return echo;
}

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
    std::vector<const char*> out;
    for (const auto& s : v) out.push_back(s.c_str());
    return out;
}

// Shared driver: runs every p-point and hands each report to `emit`.
template <class Emit>
void for_each_point(const SweepArgs& a, bool keep_records, Emit&& emit) {
    const bool from_file = !a.src.model_path.empty();
    if (from_file && !a.p.empty()) throw Failure{exit_usage, "--p applies to generated models only"};
    if (!from_file && a.p.empty()) throw Failure{exit_usage, "--p is required with --code"};
    const CodePtr code = from_file ? nullptr : make_code(a.src);
    const auto config = config_of(a.decoder);
    const std::vector<double> grid = from_file ? std::vector<double>{0.0} : a.p;
    for (double p : grid) {
        const auto model = make_model(a.src, code.get(), p);
        const double label = from_file ? lsd_model_mean_prior(model.get()) : p;
        lsd_run_options opts;
        lsd_run_options_default(&opts);
        opts.shots = a.shots;
        opts.seed = a.seed;
        opts.threads = a.threads;
        opts.cycles = a.cycles ? a.cycles : a.src.rounds;
        opts.keep_records = keep_records ? 1 : 0;
        if (a.window.window > 0) {
            opts.window = a.window.window;
            opts.commit = a.window.commit;
            opts.rounds = a.src.rounds;
            opts.detectors_per_round = detectors_per_round(a.src, a.window, code.get(), model.get());
        }
        lsd_run_report report{};
        lsd_records* raw = nullptr;
        check(lsd_run(model.get(), &config, &opts, label, &report, keep_records ? &raw : nullptr));
        const RecordsPtr records(raw);
        if (a.progress) {
            std::cerr << "p=" << label << " shots=" << report.shots << " failures=" << report.failures
                      << " decode_errors=" << report.decode_errors << '\n';
        }
        emit(report, records.get());
    }
}

void write_jsonl(Output& out, const lsd_records* records, double p) {
    char* text = nullptr;
    check(lsd_records_format_jsonl(records, p, &text));
    out.stream() << take(text);
}

int run_sweep(const SweepArgs& a) {
    const auto config = config_of(a.decoder);
    const auto echo = echo_of("sweep", a, config, a.cycles ? a.cycles : a.src.rounds);
    const auto echo_c = c_strings(echo);
    char* header = nullptr;
    check(lsd_format_csv_header(echo_c.data(), echo_c.size(), &header));
    Output out(a.out);
    out.stream() << take(header);
    std::unique_ptr<Output> jsonl;
    if (!a.jsonl.empty()) jsonl = std::make_unique<Output>(a.jsonl);
    if (a.shots > 0) {
        for_each_point(a, jsonl != nullptr, [&](const lsd_run_report& report, const lsd_records* records) {
            char* row = nullptr;
            check(lsd_format_csv_row(&report, &row));
            out.stream() << take(row);
            out.stream().flush();
            if (jsonl) write_jsonl(*jsonl, records, report.p);
        });
    }
    out.finish(a.out);
    if (jsonl) jsonl->finish(a.jsonl);
    return 0;
}

int run_stats(const SweepArgs& a) {
    if (a.shots == 0) throw Failure{exit_usage, "stats needs --shots > 0"};
    const auto config = config_of(a.decoder);
    const auto echo = echo_of("stats", a, config, a.cycles ? a.cycles : a.src.rounds);
    const auto echo_c = c_strings(echo);
    Output out(a.out);
    std::unique_ptr<Output> jsonl;
    if (!a.jsonl.empty()) jsonl = std::make_unique<Output>(a.jsonl);
    bool first = true;
    for_each_point(a, true, [&](const lsd_run_report& report, const lsd_records* records) {
        char* text = nullptr;
        check(lsd_records_format_stats(records, first ? echo_c.data() : nullptr, first ? echo_c.size() : 0,
                                       report.p, &text));
        std::string block = take(text);
        // Later points drop the repeated column header.
        if (!first) block.erase(0, block.find('\n') + 1);
        out.stream() << block;
        if (jsonl) write_jsonl(*jsonl, records, report.p);
        first = false;
    });
    out.finish(a.out);
    if (jsonl) jsonl->finish(a.jsonl);
    return 0;
}

void add_sweep_flags(CLI::App* app, SweepArgs& a) {
    add_model_source(app, a.src);
    add_decoder_flags(app, a.decoder);
    add_window_flags(app, a.window);
    app->add_option("--p", a.p, "Physical error rates (comma separated)")->delimiter(',');
    app->add_option("--shots", a.shots, "Shots per point");
    app->add_option("--threads", a.threads, "Worker threads")->check(CLI::PositiveNumber);
    app->add_option("--cycles", a.cycles, "Syndrome cycles for the per-cycle rate (default: --rounds)");
    app->add_option("-o,--out", a.out, "Output CSV (default: stdout)");
    app->add_option("--jsonl", a.jsonl, "Also write per-shot records as JSON lines");
    app->add_flag("--progress", a.progress, "Report each finished point on stderr");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LSD decoding toolkit"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate models, seed matrices and syndrome files");
    gen_cmd->require_subcommand(1);
    for (const char* family : {"surface", "repetition", "hgp", "bb"}) {
        auto* sub = gen_cmd->add_subcommand(family, std::string("Detector model of a ") + family + " code");
        add_code_flags(sub, gen.src);
        sub->add_option("--p", gen.p, "Physical error rate");
        sub->add_option("-o,--out", gen.out, "Output file (default: stdout)");
        sub->callback([&gen, family] { gen.src.code = family; });
    }
    auto* gen_regular_cmd = gen_cmd->add_subcommand("regular", "Random regular matrix without 4-cycles");
    gen_regular_cmd->add_option("--rows", gen.rows)->required();
    gen_regular_cmd->add_option("--cols", gen.cols)->required();
    gen_regular_cmd->add_option("--col-weight", gen.col_weight);
    gen_regular_cmd->add_option("--row-weight", gen.row_weight);
    gen_regular_cmd->add_option("--seed", gen.seed);
    gen_regular_cmd->add_flag("--full-rank", gen.full_rank);
    gen_regular_cmd->add_option("-o,--out", gen.out)->required();
    auto* gen_syn_cmd = gen_cmd->add_subcommand("syndromes", "Sample syndrome lines from a model");
    gen_syn_cmd->add_option("--model", gen.src.model_path)->required();
    gen_syn_cmd->add_option("--shots", gen.shots)->required();
    gen_syn_cmd->add_option("--seed", gen.seed)->required();
    gen_syn_cmd->add_option("-o,--out", gen.out);

    DecodeArgs dec;
    auto* decode_cmd = app.add_subcommand("decode", "Decode one syndrome line per shot");
    decode_cmd->add_option("--model", dec.model_path)->required();
    decode_cmd->add_option("--syndromes", dec.syndromes, "Syndrome file (default: stdin)");
    decode_cmd->add_option("-o,--out", dec.out, "Corrections (default: stdout)");
    decode_cmd->add_option("--rounds", dec.rounds, "Rounds in the model, for --window")->check(CLI::PositiveNumber);
    add_decoder_flags(decode_cmd, dec.decoder);
    add_window_flags(decode_cmd, dec.window);

    auto* verify_cmd = app.add_subcommand("verify", "Replay corrections against their syndromes");
    verify_cmd->add_option("--model", dec.model_path)->required();
    verify_cmd->add_option("--syndromes", dec.syndromes)->required();
    verify_cmd->add_option("--corrections", dec.corrections)->required();

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo logical error rates, one CSV row per p");
    add_sweep_flags(sweep_cmd, sweep);
    sweep_cmd->add_option("--seed", sweep.seed, "Run seed")->required();

    SweepArgs stats;
    auto* stats_cmd = app.add_subcommand("stats", "Cluster statistics for LSD and for the true error");
    add_sweep_flags(stats_cmd, stats);
    stats_cmd->add_option("--seed", stats.seed, "Run seed")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (gen_cmd->parsed()) {
            if (gen_regular_cmd->parsed()) return gen_regular(gen);
            if (gen_syn_cmd->parsed()) return gen_syndromes(gen);
            return gen_model(gen);
        }
        if (decode_cmd->parsed()) return run_decode(dec);
        if (verify_cmd->parsed()) return run_verify(dec);
        if (sweep_cmd->parsed()) return run_sweep(sweep);
        if (stats_cmd->parsed()) return run_stats(stats);
    } catch (const Failure& f) {
        std::cerr << "lsd: " << f.message << '\n';
        return f.code;
    }
    return exit_usage;
}
