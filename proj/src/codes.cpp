#include "lsd/codes.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "lsd/error.hpp"

namespace lsd {

std::size_t gf2_rank(const SparseBinaryMatrix& m) {
    return OtfFactorization::decompose(m).rank();
}

std::vector<std::vector<Index>> kernel_basis(const SparseBinaryMatrix& m) {
    const auto fact = OtfFactorization::decompose(m);
    std::vector<std::vector<Index>> basis;
    for (std::size_t position : fact.dependent_cols()) {
        const Index j = fact.col_order()[position];
        const std::vector<Index> unit{j};
        basis.push_back(xor_support(fact.solve(m.col(j)), unit));
    }
    return basis;
}

namespace {

// Kernel vectors of `checks` that are independent of the row space of
// `stabilizers` (and of each other).
SparseBinaryMatrix select_logicals(const SparseBinaryMatrix& checks, const SparseBinaryMatrix& stabilizers) {
    const std::size_t n = checks.cols();
    OtfFactorization span;
    for (std::size_t q = 0; q < n; ++q) span.add_row(static_cast<Index>(q));
    for (std::size_t r = 0; r < stabilizers.rows(); ++r) span.add_column(static_cast<Index>(r), stabilizers.row(r));
    std::vector<std::vector<Index>> logicals;
    Index next_id = static_cast<Index>(stabilizers.rows());
    for (auto& v : kernel_basis(checks)) {
        if (span.add_column(next_id++, v).new_pivot) logicals.push_back(std::move(v));
    }
    return SparseBinaryMatrix::from_rows(n, logicals);
}

bool is_zero(const SparseBinaryMatrix& m) { return m.nnz() == 0; }

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    // Rejection sampling keeps the stream identical across standard libraries.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

}  // namespace

CssCode make_css_code(std::string name, SparseBinaryMatrix hx, SparseBinaryMatrix hz) {
    if (hx.cols() != hz.cols()) throw Error(ErrorCode::invalid_argument, "hx and hz act on different qubit counts");
    if (!is_zero(multiply(hx, hz.transpose()))) {
        throw Error(ErrorCode::invalid_argument, "hx·hzᵀ != 0: checks do not commute");
    }
    CssCode code;
    code.name = std::move(name);
    code.n = hx.cols();
    const std::size_t rx = gf2_rank(hx), rz = gf2_rank(hz);
    code.k = code.n - rx - rz;
    code.logicals_z = select_logicals(hx, hz);
    code.logicals_x = select_logicals(hz, hx);
    if (code.logicals_z.rows() != code.k || code.logicals_x.rows() != code.k) {
        throw Error(ErrorCode::invalid_argument, "logical count disagrees with n - rank(hx) - rank(hz)");
    }
    code.hx = std::move(hx);
    code.hz = std::move(hz);
    return code;
}

CssCode surface_code(std::uint32_t d) {
    if (d < 3 || d % 2 == 0) throw Error(ErrorCode::invalid_argument, "surface code distance must be odd and >= 3");
    const int size = static_cast<int>(d);
    std::vector<std::vector<Index>> x_checks, z_checks;
    for (int a = -1; a < size; ++a) {
        for (int b = -1; b < size; ++b) {
            const bool x_type = ((a + b) % 2 + 2) % 2 == 0;
            const bool vertical_edge = a == -1 || a == size - 1;
            const bool horizontal_edge = b == -1 || b == size - 1;
            if (vertical_edge && horizontal_edge) continue;
            if (vertical_edge && !x_type) continue;
            if (horizontal_edge && x_type) continue;
            std::vector<Index> qubits;
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    const int r = a + i, c = b + j;
                    if (r >= 0 && r < size && c >= 0 && c < size) qubits.push_back(static_cast<Index>(r * size + c));
                }
            }
            (x_type ? x_checks : z_checks).push_back(std::move(qubits));
        }
    }
    const std::size_t n = static_cast<std::size_t>(d) * d;
    return make_css_code("surface_d" + std::to_string(d), SparseBinaryMatrix::from_rows(n, x_checks),
                         SparseBinaryMatrix::from_rows(n, z_checks));
}

SparseBinaryMatrix repetition_parity(std::uint32_t d) {
    if (d < 2) throw Error(ErrorCode::invalid_argument, "repetition code needs d >= 2");
    std::vector<std::vector<Index>> rows;
    for (Index i = 0; i + 1 < d; ++i) rows.push_back({i, i + 1});
    return SparseBinaryMatrix::from_rows(d, rows);
}

CssCode repetition_code(std::uint32_t d) {
    return make_css_code("repetition_d" + std::to_string(d), repetition_parity(d), SparseBinaryMatrix(0, d));
}

CssCode hypergraph_product(const SparseBinaryMatrix& h1, const SparseBinaryMatrix& h2) {
    const auto i_n1 = SparseBinaryMatrix::identity(h1.cols()), i_m1 = SparseBinaryMatrix::identity(h1.rows());
    const auto i_n2 = SparseBinaryMatrix::identity(h2.cols()), i_m2 = SparseBinaryMatrix::identity(h2.rows());
    auto hx = hstack(kron(h1, i_n2), kron(i_m1, h2.transpose()));
    auto hz = hstack(kron(i_n1, h2), kron(h1.transpose(), i_m2));
    return make_css_code("hgp_" + std::to_string(h1.rows()) + "x" + std::to_string(h1.cols()) + "_" +
                             std::to_string(h2.rows()) + "x" + std::to_string(h2.cols()),
                         std::move(hx), std::move(hz));
}

CssCode bivariate_bicycle(std::uint32_t l, std::uint32_t m, const std::vector<Monomial>& a,
                          const std::vector<Monomial>& b) {
    if (l < 1 || m < 1) throw Error(ErrorCode::invalid_argument, "bivariate bicycle needs l, m >= 1");
    if (a.empty() || b.empty()) throw Error(ErrorCode::invalid_argument, "bivariate bicycle needs non-empty exponent lists");
    const std::size_t size = static_cast<std::size_t>(l) * m;
    auto polynomial = [&](const std::vector<Monomial>& terms) {
        // Row (i, j) has a one at ((i + x) mod l, (j + y) mod m); repeated
        // monomials cancel.
        std::vector<std::vector<std::uint8_t>> dense(size, std::vector<std::uint8_t>(size, 0));
        for (const Monomial& t : terms) {
            for (std::size_t i = 0; i < l; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    const std::size_t row = i * m + j;
                    const std::size_t col = ((i + t.x) % l) * m + (j + t.y) % m;
                    dense[row][col] ^= 1U;
                }
            }
        }
        return SparseBinaryMatrix::from_dense(dense);
    };
    const auto pa = polynomial(a), pb = polynomial(b);
    return make_css_code("bb_" + std::to_string(l) + "_" + std::to_string(m), hstack(pa, pb),
                         hstack(pb.transpose(), pa.transpose()));
}

BivariateBicycleSpec parse_bb_spec(std::istream& in) {
    BivariateBicycleSpec spec;
    bool have_l = false, have_m = false;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": " + what);
    };
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        std::istringstream tokens(line.substr(0, line.find('#')));
        std::string key;
        if (!(tokens >> key)) continue;
        if (key == "l" || key == "m") {
            long long v = 0;
            if (!(tokens >> v) || v < 1) fail("expected a positive integer after '" + key + "'");
            (key == "l" ? spec.l : spec.m) = static_cast<std::uint32_t>(v);
            (key == "l" ? have_l : have_m) = true;
        } else if (key == "a" || key == "b") {
            auto& terms = key == "a" ? spec.a : spec.b;
            for (std::string term; tokens >> term;) {
                const auto comma = term.find(',');
                if (comma == std::string::npos) fail("monomial must be written x,y");
                try {
                    std::size_t used_x = 0, used_y = 0;
                    const auto x = std::stoul(term.substr(0, comma), &used_x);
                    const auto y = std::stoul(term.substr(comma + 1), &used_y);
                    if (used_x != comma || used_y != term.size() - comma - 1) fail("bad monomial '" + term + "'");
                    terms.push_back({static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)});
                } catch (const std::logic_error&) {
                    fail("bad monomial '" + term + "'");
                }
            }
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    if (!have_l || !have_m) throw Error(ErrorCode::parse, "bivariate bicycle config needs both l and m");
    return spec;
}

BivariateBicycleSpec load_bb_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
    return parse_bb_spec(in);
}

SparseBinaryMatrix random_regular_matrix(std::size_t rows, std::size_t cols, std::uint32_t col_weight,
                                         std::uint32_t row_weight, std::uint64_t seed, bool full_rank) {
    if (rows * row_weight != cols * col_weight) {
        throw Error(ErrorCode::invalid_argument, "rows*row_weight must equal cols*col_weight");
    }
    if (col_weight > rows || row_weight > cols) throw Error(ErrorCode::invalid_argument, "weights exceed dimensions");
    std::mt19937_64 rng(seed);
    constexpr int max_attempts = 200000;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<std::uint32_t> capacity(rows, row_weight);
        std::vector<std::uint8_t> pair_used(rows * rows, 0);
        std::vector<std::vector<Index>> columns(cols);
        bool ok = true;
        for (std::size_t c = 0; c < cols && ok; ++c) {
            auto& chosen = columns[c];
            for (std::uint32_t t = 0; t < col_weight; ++t) {
                // Rows with spare capacity that would not close a 4-cycle,
                // drawn with probability proportional to their capacity.
                std::vector<Index> options;
                std::uint64_t total = 0;
                for (Index r = 0; r < rows; ++r) {
                    if (capacity[r] == 0 || std::find(chosen.begin(), chosen.end(), r) != chosen.end()) continue;
                    bool clash = false;
                    for (Index q : chosen) clash = clash || pair_used[r * rows + q];
                    if (clash) continue;
                    options.push_back(r);
                    total += capacity[r];
                }
                if (options.empty()) {
                    ok = false;
                    break;
                }
                std::uint64_t pick = uniform_below(rng, total);
                Index row = options.back();
                for (Index r : options) {
                    if (pick < capacity[r]) {
                        row = r;
                        break;
                    }
                    pick -= capacity[r];
                }
                chosen.push_back(row);
            }
            if (!ok) break;
            for (Index r : chosen) {
                --capacity[r];
                for (Index q : chosen) {
                    if (q != r) pair_used[r * rows + q] = 1;
                }
            }
        }
        if (!ok) continue;
        auto m = SparseBinaryMatrix::from_columns(rows, columns);
        if (full_rank && gf2_rank(m) != rows) continue;
        return m;
    }
    throw Error(ErrorCode::invalid_argument, "no regular matrix found within the attempt budget");
}

SparseBinaryMatrix parse_dense_matrix(std::istream& in) {
    std::vector<std::vector<std::uint8_t>> dense;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        std::istringstream tokens(line.substr(0, line.find('#')));
        std::vector<std::uint8_t> row;
        for (std::string tok; tokens >> tok;) {
            if (tok != "0" && tok != "1") {
                throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": expected 0 or 1, got '" + tok + "'");
            }
            row.push_back(tok == "1" ? 1 : 0);
        }
        if (row.empty()) continue;
        if (!dense.empty() && row.size() != dense.front().size()) {
            throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": row length differs from first row");
        }
        dense.push_back(std::move(row));
    }
    return SparseBinaryMatrix::from_dense(dense);
}

SparseBinaryMatrix load_dense_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
    return parse_dense_matrix(in);
}

void write_dense_matrix(std::ostream& out, const SparseBinaryMatrix& m) {
    for (const auto& row : m.to_dense()) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << int{row[c]};
        out << '\n';
    }
}

namespace {

void check_probability(double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::invalid_argument, "error probability must lie in (0, 1)");
}

}  // namespace

DetectorModel code_capacity_model(const CssCode& code, Side side, double p) {
    check_probability(p);
    DetectorModel model;
    model.h = side == Side::z ? code.hz : code.hx;
    model.observables = side == Side::z ? code.logicals_z : code.logicals_x;
    model.priors.assign(code.n, p);
    model.validate();
    return model;
}

DetectorModel phenomenological_model(const CssCode& code, Side side, double p, std::uint32_t rounds) {
    check_probability(p);
    if (rounds < 1) throw Error(ErrorCode::invalid_argument, "need at least one round");
    const SparseBinaryMatrix& checks = side == Side::z ? code.hz : code.hx;
    const SparseBinaryMatrix& logicals = side == Side::z ? code.logicals_z : code.logicals_x;
    const std::size_t n = code.n, m = checks.rows();
    const std::size_t num_faults = rounds * n + (rounds - 1) * m;

    std::vector<std::pair<Index, Index>> h_entries, obs_entries;
    for (std::size_t r = 0; r < rounds; ++r) {
        for (std::size_t q = 0; q < n; ++q) {
            const auto col = static_cast<Index>(r * n + q);
            for (Index i : checks.col(q)) h_entries.emplace_back(static_cast<Index>(r * m + i), col);
            for (Index l : logicals.col(q)) obs_entries.emplace_back(l, col);
        }
    }
    for (std::size_t r = 0; r + 1 < rounds; ++r) {
        for (std::size_t i = 0; i < m; ++i) {
            const auto col = static_cast<Index>(rounds * n + r * m + i);
            h_entries.emplace_back(static_cast<Index>(r * m + i), col);
            h_entries.emplace_back(static_cast<Index>((r + 1) * m + i), col);
        }
    }
    DetectorModel model;
    model.h = SparseBinaryMatrix::from_entries(rounds * m, num_faults, h_entries);
    model.observables = SparseBinaryMatrix::from_entries(logicals.rows(), num_faults, obs_entries);
    model.priors.assign(num_faults, p);
    model.validate();
    return model;
}

}  // namespace lsd
