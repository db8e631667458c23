#include "lsd/bp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsd/error.hpp"

namespace lsd {

void BpConfig::validate() const {
    if (max_iterations < 1) throw Error(ErrorCode::invalid_argument, "BP needs at least one iteration");
    if (!(scaling_factor > 0.0 && scaling_factor <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "BP scaling factor must lie in (0, 1]");
    }
    if (!(clip > 0.0)) throw Error(ErrorCode::invalid_argument, "BP clip must be positive");
}

BpDecoder::BpDecoder(const SparseBinaryMatrix& h, std::vector<double> channel_llrs, BpConfig config)
    : channel_(std::move(channel_llrs)), config_(config), num_checks_(h.rows()), var_edges_(h.cols()) {
    config_.validate();
    if (channel_.size() != h.cols()) throw Error(ErrorCode::invalid_argument, "LLR count does not match H");
    for (double l : channel_) {
        if (!std::isfinite(l)) throw Error(ErrorCode::invalid_argument, "channel LLRs must be finite");
    }
    check_begin_.reserve(h.rows() + 1);
    check_begin_.push_back(0);
    for (std::size_t c = 0; c < h.rows(); ++c) {
        for (Index v : h.row(c)) {
            var_edges_[v].push_back(edge_var_.size());
            edge_var_.push_back(v);
            edge_check_.push_back(static_cast<Index>(c));
        }
        check_begin_.push_back(edge_var_.size());
    }
}

void BpDecoder::update_check(std::size_t c, bool flipped, const std::vector<double>& v2c,
                             std::vector<double>& c2v) const {
    const std::size_t begin = check_begin_[c], end = check_begin_[c + 1];
    if (begin == end) return;
    double min1 = std::numeric_limits<double>::infinity(), min2 = min1;
    std::size_t argmin = begin;
    bool parity = flipped;
    for (std::size_t e = begin; e < end; ++e) {
        const double m = v2c[e];
        if (m < 0.0) parity = !parity;
        const double a = std::fabs(m);
        if (a < min1) {
            min2 = min1;
            min1 = a;
            argmin = e;
        } else if (a < min2) {
            min2 = a;
        }
    }
    for (std::size_t e = begin; e < end; ++e) {
        const double magnitude = std::min(config_.scaling_factor * (e == argmin ? min2 : min1), config_.clip);
        // Remove this edge's own sign from the product.
        const bool negative = parity != (v2c[e] < 0.0);
        c2v[e] = negative ? -magnitude : magnitude;
    }
}

double BpDecoder::check_to_edge(std::size_t c, std::size_t edge, bool flipped,
                                const std::vector<double>& v2c) const {
    double magnitude = std::numeric_limits<double>::infinity();
    bool negative = flipped;
    for (std::size_t e = check_begin_[c]; e < check_begin_[c + 1]; ++e) {
        if (e == edge) continue;
        if (v2c[e] < 0.0) negative = !negative;
        magnitude = std::min(magnitude, std::fabs(v2c[e]));
    }
    magnitude = std::min(config_.scaling_factor * magnitude, config_.clip);
    return negative ? -magnitude : magnitude;
}

bool BpDecoder::matches(const std::vector<std::uint8_t>& hard, const std::vector<std::uint8_t>& flipped) const {
    for (std::size_t c = 0; c < num_checks_; ++c) {
        std::uint8_t parity = 0;
        for (std::size_t e = check_begin_[c]; e < check_begin_[c + 1]; ++e) parity ^= hard[edge_var_[e]];
        if (parity != flipped[c]) return false;
    }
    return true;
}

BpResult BpDecoder::decode(std::span<const Index> syndrome) const {
    const std::size_t n = channel_.size();
    std::vector<std::uint8_t> flipped(num_checks_, 0);
    for (Index d : syndrome) {
        if (d >= num_checks_) throw Error(ErrorCode::invalid_argument, "syndrome index out of range");
        flipped[d] ^= 1U;
    }
    const double clip = config_.clip;
    auto clamp = [clip](double x) { return std::clamp(x, -clip, clip); };

    std::vector<double> v2c(edge_var_.size()), c2v(edge_var_.size(), 0.0);
    for (std::size_t e = 0; e < edge_var_.size(); ++e) v2c[e] = clamp(channel_[edge_var_[e]]);

    BpResult result;
    result.llrs.assign(n, 0.0);
    std::vector<std::uint8_t> hard(n, 0);

    for (std::uint32_t it = 1; it <= config_.max_iterations; ++it) {
        if (config_.schedule == BpSchedule::parallel) {
            for (std::size_t c = 0; c < num_checks_; ++c) update_check(c, flipped[c] != 0, v2c, c2v);
            for (std::size_t v = 0; v < n; ++v) {
                double posterior = channel_[v];
                for (std::size_t e : var_edges_[v]) posterior += c2v[e];
                result.llrs[v] = posterior;
                hard[v] = posterior < 0.0 ? 1 : 0;
                for (std::size_t e : var_edges_[v]) v2c[e] = clamp(posterior - c2v[e]);
            }
        } else {
            for (std::size_t v = 0; v < n; ++v) {
                double posterior = channel_[v];
                for (std::size_t e : var_edges_[v]) {
                    c2v[e] = check_to_edge(edge_check_[e], e, flipped[edge_check_[e]] != 0, v2c);
                    posterior += c2v[e];
                }
                result.llrs[v] = posterior;
                hard[v] = posterior < 0.0 ? 1 : 0;
                for (std::size_t e : var_edges_[v]) v2c[e] = clamp(posterior - c2v[e]);
            }
        }
        result.iterations = it;
        if (matches(hard, flipped)) {
            result.converged = true;
            break;
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (hard[v]) result.hard.push_back(static_cast<Index>(v));
    }
    return result;
}

BpResult bp_decode(const DetectorModel& model, std::span<const Index> syndrome, const BpConfig& config) {
    const BpDecoder decoder(model.h, channel_llrs(model.priors), config);
    return decoder.decode(syndrome);
}

}  // namespace lsd
