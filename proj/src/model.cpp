#include "lsd/model.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "lsd/error.hpp"

namespace lsd {

void DetectorModel::validate() const {
    if (priors.size() != h.cols()) {
        throw Error(ErrorCode::invalid_argument, "prior count does not match fault count");
    }
    for (double p : priors) {
        if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::invalid_argument, "prior outside (0, 1)");
    }
    if (observables.cols() != h.cols()) {
        throw Error(ErrorCode::invalid_argument, "observable matrix column count does not match");
    }
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::parse, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> tokenize(const std::string& line) {
    std::string body = line.substr(0, line.find('#'));
    std::istringstream in(body);
    std::vector<std::string> tokens;
    for (std::string tok; in >> tok;) tokens.push_back(tok);
    return tokens;
}

std::size_t parse_count(const std::string& tok, std::size_t line) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) parse_fail(line, "expected a count, got '" + tok + "'");
    return value;
}

double parse_probability(const std::string& tok, std::size_t line) {
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(tok.c_str(), &end);
    if (errno != 0 || end != tok.c_str() + tok.size() || !std::isfinite(value)) {
        parse_fail(line, "expected a probability, got '" + tok + "'");
    }
    if (!(value > 0.0 && value < 1.0)) parse_fail(line, "probability " + tok + " outside (0, 1)");
    return value;
}

}  // namespace

DetectorModel parse_model(std::istream& in) {
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t num_detectors = 0, num_faults = 0, num_observables = 0;
    std::vector<std::pair<Index, Index>> h_entries, obs_entries;
    std::vector<double> priors;

    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        if (!have_header) {
            if (tokens.size() != 5 || tokens[0] != "qdem" || tokens[1] != "1") {
                parse_fail(line_no, "expected header 'qdem 1 <detectors> <faults> <observables>'");
            }
            num_detectors = parse_count(tokens[2], line_no);
            num_faults = parse_count(tokens[3], line_no);
            num_observables = parse_count(tokens[4], line_no);
            have_header = true;
            continue;
        }
        if (tokens[0] != "f") parse_fail(line_no, "expected fault line starting with 'f'");
        if (priors.size() == num_faults) parse_fail(line_no, "more fault lines than declared");
        if (tokens.size() < 3 || tokens[2] != "d") parse_fail(line_no, "expected 'f <prob> d ...'");
        const auto column = static_cast<Index>(priors.size());
        priors.push_back(parse_probability(tokens[1], line_no));

        std::vector<Index> dets, obs;
        bool in_observables = false;
        for (std::size_t t = 3; t < tokens.size(); ++t) {
            if (tokens[t] == "L") {
                if (in_observables) parse_fail(line_no, "repeated 'L' section");
                in_observables = true;
                continue;
            }
            const std::size_t idx = parse_count(tokens[t], line_no);
            if (in_observables) {
                if (idx >= num_observables) parse_fail(line_no, "observable index out of range");
                obs.push_back(static_cast<Index>(idx));
            } else {
                if (idx >= num_detectors) parse_fail(line_no, "detector index out of range");
                dets.push_back(static_cast<Index>(idx));
            }
        }
        for (auto* list : {&dets, &obs}) {
            std::sort(list->begin(), list->end());
            if (std::adjacent_find(list->begin(), list->end()) != list->end()) {
                parse_fail(line_no, "repeated index in fault line");
            }
        }
        for (Index d : dets) h_entries.emplace_back(d, column);
        for (Index l : obs) obs_entries.emplace_back(l, column);
    }
    if (!have_header) parse_fail(line_no, "missing header");
    if (priors.size() != num_faults) parse_fail(line_no, "fewer fault lines than declared");

    DetectorModel model;
    model.h = SparseBinaryMatrix::from_entries(num_detectors, num_faults, h_entries);
    model.observables = SparseBinaryMatrix::from_entries(num_observables, num_faults, obs_entries);
    model.priors = std::move(priors);
    model.validate();
    return model;
}

DetectorModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
    return parse_model(in);
}

void write_model(std::ostream& out, const DetectorModel& model) {
    model.validate();
    out << "qdem 1 " << model.num_detectors() << ' ' << model.num_faults() << ' ' << model.num_observables()
        << '\n';
    char buf[32];
    for (std::size_t f = 0; f < model.num_faults(); ++f) {
        std::snprintf(buf, sizeof buf, "%.17g", model.priors[f]);
        out << "f " << buf << " d";
        for (Index d : model.h.col(f)) out << ' ' << d;
        if (!model.observables.col(f).empty()) {
            out << " L";
            for (Index l : model.observables.col(f)) out << ' ' << l;
        }
        out << '\n';
    }
}

void save_model(const DetectorModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
    write_model(out, model);
    if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

FaultGraph fault_graph(const SparseBinaryMatrix& h) {
    FaultGraph graph(h.cols());
    for (std::size_t r = 0; r < h.rows(); ++r) {
        const auto row = h.row(r);
        for (Index u : row) {
            for (Index v : row) {
                if (u != v) graph[u].push_back(v);
            }
        }
    }
    for (auto& nbrs : graph) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    return graph;
}

std::vector<std::vector<Index>> error_clusters(const SparseBinaryMatrix& h, std::span<const Index> error) {
    std::vector<Index> faults(error.begin(), error.end());
    std::sort(faults.begin(), faults.end());
    faults.erase(std::unique(faults.begin(), faults.end()), faults.end());

    // Union-find over positions in `faults`, linked through shared detectors.
    std::vector<std::size_t> parent(faults.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::unordered_map<Index, std::size_t> first_at_detector;
    for (std::size_t i = 0; i < faults.size(); ++i) {
        if (faults[i] >= h.cols()) throw Error(ErrorCode::invalid_argument, "fault index out of range");
        for (Index d : h.col(faults[i])) {
            auto [it, inserted] = first_at_detector.try_emplace(d, i);
            if (!inserted) {
                const std::size_t a = find(it->second), b = find(i);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }
    std::vector<std::vector<Index>> clusters;
    std::unordered_map<std::size_t, std::size_t> slot;
    for (std::size_t i = 0; i < faults.size(); ++i) {
        const std::size_t root = find(i);
        auto [it, inserted] = slot.try_emplace(root, clusters.size());
        if (inserted) clusters.emplace_back();
        clusters[it->second].push_back(faults[i]);
    }
    return clusters;
}

std::vector<double> channel_llrs(std::span<const double> priors) {
    std::vector<double> llrs;
    llrs.reserve(priors.size());
    for (double p : priors) llrs.push_back(std::log((1.0 - p) / p));
    return llrs;
}

bool satisfies_syndrome(const SparseBinaryMatrix& h, std::span<const Index> correction,
                        std::span<const Index> syndrome) {
    std::vector<Index> expected(syndrome.begin(), syndrome.end());
    std::sort(expected.begin(), expected.end());
    return h.multiply(correction) == expected;
}

}  // namespace lsd
