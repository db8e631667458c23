#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lsd {

using Index = std::uint32_t;

/// Sparse matrix over GF(2) with both row-major and column-major access.
/// Entries are stored as sorted index lists; duplicates are rejected.
class SparseBinaryMatrix {
public:
    SparseBinaryMatrix() = default;
    SparseBinaryMatrix(std::size_t rows, std::size_t cols);

    static SparseBinaryMatrix from_entries(std::size_t rows, std::size_t cols,
                                           std::span<const std::pair<Index, Index>> entries);
    static SparseBinaryMatrix from_columns(std::size_t rows,
                                           const std::vector<std::vector<Index>>& columns);
    static SparseBinaryMatrix from_rows(std::size_t cols, const std::vector<std::vector<Index>>& rows);
    static SparseBinaryMatrix from_dense(const std::vector<std::vector<std::uint8_t>>& dense);
    static SparseBinaryMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return num_rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return num_cols_; }
    [[nodiscard]] std::size_t nnz() const noexcept { return nnz_; }

    [[nodiscard]] std::span<const Index> row(std::size_t r) const { return row_lists_.at(r); }
    [[nodiscard]] std::span<const Index> col(std::size_t c) const { return col_lists_.at(c); }
    [[nodiscard]] bool get(std::size_t r, std::size_t c) const;

    [[nodiscard]] SparseBinaryMatrix transpose() const;

    /// Image of a column-support vector: returns the sorted support of M·e.
    [[nodiscard]] std::vector<Index> multiply(std::span<const Index> support) const;

    /// Rows and columns given as ascending global index lists.
    [[nodiscard]] SparseBinaryMatrix submatrix(std::span<const Index> row_ids,
                                               std::span<const Index> col_ids) const;

    [[nodiscard]] std::vector<std::vector<std::uint8_t>> to_dense() const;

    bool operator==(const SparseBinaryMatrix& other) const = default;

private:
    std::size_t num_rows_ = 0;
    std::size_t num_cols_ = 0;
    std::size_t nnz_ = 0;
    std::vector<std::vector<Index>> row_lists_;
    std::vector<std::vector<Index>> col_lists_;
};

/// GF(2) product A·B.
SparseBinaryMatrix multiply(const SparseBinaryMatrix& a, const SparseBinaryMatrix& b);
/// Kronecker product A ⊗ B.
SparseBinaryMatrix kron(const SparseBinaryMatrix& a, const SparseBinaryMatrix& b);
/// [A | B]; row counts must agree.
SparseBinaryMatrix hstack(const SparseBinaryMatrix& a, const SparseBinaryMatrix& b);
/// [A ; B]; column counts must agree.
SparseBinaryMatrix vstack(const SparseBinaryMatrix& a, const SparseBinaryMatrix& b);
/// Sorted symmetric difference of two sorted supports.
std::vector<Index> xor_support(std::span<const Index> a, std::span<const Index> b);

/// Incremental PLU factorization of a column-growing sparse matrix.
///
/// Rows and columns carry global ids and are mapped to local slots in order of
/// first appearance. Row permutations are never materialized: every pivot is
/// identified by the local row slot it lives on, and pivots are ordered by
/// creation. The elimination step of pivot k adds its pivot row into the
/// target rows E_k, all of which were unpivoted when k was created, so
/// replaying the pivots in order reproduces the reduced columns exactly.
///
/// A syndrome vector over the row universe is carried along and kept in
/// eliminated form, which makes the image-membership test O(1).
class OtfFactorization {
public:
    struct RowOp {
        Index target;  // local row
        Index source;  // local row (a pivot row)
        bool operator==(const RowOp&) const = default;
    };

    struct AddResult {
        bool new_pivot = false;
        std::size_t ops_appended = 0;
        std::size_t reduced_weight = 0;  // residue weight before this column's own elimination
    };

    OtfFactorization() = default;

    /// Full factorization of M; all rows of M are enclosed in ascending order,
    /// then columns are added left to right.
    static OtfFactorization decompose(const SparseBinaryMatrix& m);

    /// Encloses a row (no-op if present). Returns its local slot.
    Index add_row(Index global_row);

    /// Toggles a syndrome bit; the row is enclosed if it was not yet.
    void toggle_syndrome_row(Index global_row);

    /// Appends a column with the given global row support. Only this column is
    /// reduced; earlier columns are never touched. Throws duplicate_column.
    AddResult add_column(Index col_id, std::span<const Index> support);

    /// Block-swap merge: appends a factorization over a disjoint row universe.
    /// Pivots of *this stay first, followed by the pivots of `other`; no column
    /// is re-eliminated. Throws overlapping_rows / duplicate_column.
    void absorb(OtfFactorization&& other);

    /// absorb(b) followed by add_column(bridge).
    static OtfFactorization merge(OtfFactorization a, OtfFactorization b, Index bridge_col,
                                  std::span<const Index> support);

    [[nodiscard]] bool in_image(std::span<const Index> s) const;
    [[nodiscard]] bool syndrome_in_image() const noexcept { return residue_count_ == 0; }

    /// Solution over global column ids (sorted); free variables are zero.
    /// Throws not_in_image.
    [[nodiscard]] std::vector<Index> solve(std::span<const Index> s) const;
    [[nodiscard]] std::vector<Index> solve_syndrome() const;

    [[nodiscard]] std::size_t rank() const noexcept { return pivot_row_.size(); }
    [[nodiscard]] std::size_t num_rows() const noexcept { return row_global_.size(); }
    [[nodiscard]] std::size_t num_cols() const noexcept { return col_global_.size(); }
    [[nodiscard]] const std::vector<Index>& row_universe() const noexcept { return row_global_; }
    [[nodiscard]] const std::vector<Index>& col_order() const noexcept { return col_global_; }
    [[nodiscard]] bool contains_row(Index global_row) const { return row_local_.contains(global_row); }
    [[nodiscard]] bool contains_col(Index col_id) const { return col_local_.contains(col_id); }

    /// Local pivot row of a column position, if that column carries a pivot.
    [[nodiscard]] std::optional<Index> pivot_row_of(std::size_t col_position) const;
    [[nodiscard]] std::vector<std::size_t> dependent_cols() const;
    [[nodiscard]] std::vector<Index> pivot_columns() const;  // global ids, in pivot order

    /// Elementary row additions in application order.
    [[nodiscard]] std::vector<RowOp> rowop_log() const;
    [[nodiscard]] std::size_t rowop_count() const noexcept { return elim_targets_.size(); }

    /// Reduced column at a position, as sorted local rows.
    [[nodiscard]] const std::vector<Index>& reduced_column(std::size_t col_position) const {
        return u_cols_.at(col_position);
    }
    /// Eliminated syndrome, as sorted local rows.
    [[nodiscard]] std::vector<Index> eliminated_syndrome() const;

    /// Number of add_column calls that performed an elimination, including
    /// those carried over from absorbed factorizations.
    [[nodiscard]] std::size_t columns_eliminated() const noexcept { return columns_eliminated_; }

private:
    // Applies the logged operations to a local-row vector; returns sorted rows.
    std::vector<Index> reduce(std::span<const Index> local_rows) const;
    std::vector<Index> to_local(std::span<const Index> global_rows, bool& outside) const;
    std::vector<Index> back_substitute(std::vector<Index> reduced) const;

    std::vector<Index> row_global_;
    std::unordered_map<Index, Index> row_local_;
    std::vector<std::int32_t> row_pivot_;  // pivot index per local row, -1 if none

    std::vector<Index> pivot_row_;
    std::vector<Index> pivot_col_;             // column position per pivot
    std::vector<std::size_t> elim_begin_{0};   // offsets into elim_targets_
    std::vector<Index> elim_targets_;

    std::vector<Index> col_global_;
    std::unordered_map<Index, Index> col_local_;
    std::vector<std::int32_t> col_pivot_;
    std::vector<std::vector<Index>> u_cols_;

    std::vector<std::uint8_t> syndrome_;
    std::size_t residue_count_ = 0;
    std::size_t columns_eliminated_ = 0;

    mutable std::vector<std::uint8_t> scratch_;
};

}  // namespace lsd
