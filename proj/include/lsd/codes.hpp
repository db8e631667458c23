#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lsd/gf2.hpp"
#include "lsd/model.hpp"

namespace lsd {

/// CSS code. logicals_z spans ker(hx) modulo rowspace(hz); logicals_x spans
/// ker(hz) modulo rowspace(hx). Both have k rows.
struct CssCode {
    std::string name;
    SparseBinaryMatrix hx;
    SparseBinaryMatrix hz;
    SparseBinaryMatrix logicals_x;
    SparseBinaryMatrix logicals_z;
    std::size_t n = 0;
    std::size_t k = 0;
};

enum class Side { x, z };

std::size_t gf2_rank(const SparseBinaryMatrix& m);

/// Basis of the right kernel, one sorted support per vector.
std::vector<std::vector<Index>> kernel_basis(const SparseBinaryMatrix& m);

/// Assembles a CSS code from its check matrices, derives logicals and k, and
/// checks the commutation and dimension identities. Throws invalid_argument.
CssCode make_css_code(std::string name, SparseBinaryMatrix hx, SparseBinaryMatrix hz);

/// Rotated surface code of odd distance d >= 3 on a d×d grid of data qubits.
CssCode surface_code(std::uint32_t d);

/// Bit-flip repetition code: hx is the (d-1)×d chain, hz is empty.
CssCode repetition_code(std::uint32_t d);

/// (d-1)×d parity-check matrix of the classical repetition code.
SparseBinaryMatrix repetition_parity(std::uint32_t d);

/// hx = [h1 ⊗ I_n2 | I_m1 ⊗ h2ᵀ], hz = [I_n1 ⊗ h2 | h1ᵀ ⊗ I_m2].
CssCode hypergraph_product(const SparseBinaryMatrix& h1, const SparseBinaryMatrix& h2);

/// Monomial x^i y^j over Z_l × Z_m.
struct Monomial {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
};

/// hx = [A | B], hz = [Bᵀ | Aᵀ] with A, B sums of commuting shift monomials.
CssCode bivariate_bicycle(std::uint32_t l, std::uint32_t m, const std::vector<Monomial>& a,
                          const std::vector<Monomial>& b);

struct BivariateBicycleSpec {
    std::uint32_t l = 0;
    std::uint32_t m = 0;
    std::vector<Monomial> a;
    std::vector<Monomial> b;
};

/// Text config: lines `l <int>`, `m <int>`, `a <x>,<y> ...`, `b <x>,<y> ...`;
/// '#' starts a comment.
BivariateBicycleSpec parse_bb_spec(std::istream& in);
BivariateBicycleSpec load_bb_spec(const std::filesystem::path& path);
inline CssCode bivariate_bicycle(const BivariateBicycleSpec& spec) {
    return bivariate_bicycle(spec.l, spec.m, spec.a, spec.b);
}

/// Random (col_weight, row_weight)-regular matrix without 4-cycles in its
/// Tanner graph, optionally of full row rank. Deterministic in the seed.
SparseBinaryMatrix random_regular_matrix(std::size_t rows, std::size_t cols, std::uint32_t col_weight,
                                         std::uint32_t row_weight, std::uint64_t seed, bool full_rank);

/// Dense text matrix: one row per line of whitespace-separated 0/1 entries;
/// '#' starts a comment.
SparseBinaryMatrix parse_dense_matrix(std::istream& in);
SparseBinaryMatrix load_dense_matrix(const std::filesystem::path& path);
void write_dense_matrix(std::ostream& out, const SparseBinaryMatrix& m);

/// Code-capacity model on one check side: side z decodes hz against the
/// z-type logicals, side x decodes hx against the x-type logicals.
DetectorModel code_capacity_model(const CssCode& code, Side side, double p);

/// Repeated noisy syndrome extraction with a final perfect round.
/// Columns: rounds blocks of n data faults, then (rounds-1) blocks of
/// measurement faults. Detectors: rounds blocks of the chosen checks, each the
/// difference of consecutive measurement outcomes.
DetectorModel phenomenological_model(const CssCode& code, Side side, double p, std::uint32_t rounds);

}  // namespace lsd
