#include "lsd/gf2.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <string>

#include "lsd/error.hpp"

namespace lsd {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid argument";
        case ErrorCode::parse: return "parse error";
        case ErrorCode::io: return "i/o error";
        case ErrorCode::unsatisfiable: return "unsatisfiable syndrome";
        case ErrorCode::duplicate_column: return "duplicate column";
        case ErrorCode::overlapping_rows: return "overlapping row universes";
        case ErrorCode::not_in_image: return "vector not in image";
        case ErrorCode::domain: return "domain error";
    }
    return "unknown error";
}

// ---------------------------------------------------------------------------
// SparseBinaryMatrix

SparseBinaryMatrix::SparseBinaryMatrix(std::size_t rows, std::size_t cols)
    : num_rows_(rows), num_cols_(cols), row_lists_(rows), col_lists_(cols) {}

SparseBinaryMatrix SparseBinaryMatrix::from_entries(std::size_t rows, std::size_t cols,
                                                    std::span<const std::pair<Index, Index>> entries) {
    SparseBinaryMatrix m(rows, cols);
    for (auto [r, c] : entries) {
        if (r >= rows || c >= cols) {
            throw Error(ErrorCode::invalid_argument,
                        "entry (" + std::to_string(r) + ", " + std::to_string(c) + ") out of range");
        }
        m.row_lists_[r].push_back(c);
        m.col_lists_[c].push_back(r);
    }
    for (auto& row : m.row_lists_) {
        std::sort(row.begin(), row.end());
        if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
            throw Error(ErrorCode::invalid_argument, "duplicate matrix entry");
        }
    }
    for (auto& col : m.col_lists_) std::sort(col.begin(), col.end());
    m.nnz_ = entries.size();
    return m;
}

SparseBinaryMatrix SparseBinaryMatrix::from_columns(std::size_t rows,
                                                    const std::vector<std::vector<Index>>& columns) {
    std::vector<std::pair<Index, Index>> entries;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        for (Index r : columns[c]) entries.emplace_back(r, static_cast<Index>(c));
    }
    return from_entries(rows, columns.size(), entries);
}

SparseBinaryMatrix SparseBinaryMatrix::from_rows(std::size_t cols, const std::vector<std::vector<Index>>& rows) {
    std::vector<std::pair<Index, Index>> entries;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (Index c : rows[r]) entries.emplace_back(static_cast<Index>(r), c);
    }
    return from_entries(rows.size(), cols, entries);
}

SparseBinaryMatrix SparseBinaryMatrix::from_dense(const std::vector<std::vector<std::uint8_t>>& dense) {
    const std::size_t rows = dense.size();
    const std::size_t cols = rows == 0 ? 0 : dense.front().size();
    std::vector<std::pair<Index, Index>> entries;
    for (std::size_t r = 0; r < rows; ++r) {
        if (dense[r].size() != cols) throw Error(ErrorCode::invalid_argument, "ragged dense matrix");
        for (std::size_t c = 0; c < cols; ++c) {
            if (dense[r][c] & 1U) entries.emplace_back(static_cast<Index>(r), static_cast<Index>(c));
        }
    }
    return from_entries(rows, cols, entries);
}

SparseBinaryMatrix SparseBinaryMatrix::identity(std::size_t n) {
    std::vector<std::pair<Index, Index>> entries;
    for (std::size_t i = 0; i < n; ++i) entries.emplace_back(static_cast<Index>(i), static_cast<Index>(i));
    return from_entries(n, n, entries);
}

bool SparseBinaryMatrix::get(std::size_t r, std::size_t c) const {
    const auto& row = row_lists_.at(r);
    return std::binary_search(row.begin(), row.end(), static_cast<Index>(c));
}

SparseBinaryMatrix SparseBinaryMatrix::transpose() const {
    SparseBinaryMatrix t(num_cols_, num_rows_);
    t.row_lists_ = col_lists_;
    t.col_lists_ = row_lists_;
    t.nnz_ = nnz_;
    return t;
}

std::vector<Index> SparseBinaryMatrix::multiply(std::span<const Index> support) const {
    std::vector<std::uint8_t> acc(num_rows_, 0);
    std::vector<Index> touched;
    for (Index c : support) {
        if (c >= num_cols_) throw Error(ErrorCode::invalid_argument, "support index out of range");
        for (Index r : col_lists_[c]) {
            if (!acc[r]) touched.push_back(r);
            acc[r] ^= 1U;
        }
    }
    std::vector<Index> out;
    for (Index r : touched) {
        if (acc[r]) {
            out.push_back(r);
            acc[r] = 0;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

SparseBinaryMatrix SparseBinaryMatrix::submatrix(std::span<const Index> row_ids,
                                                 std::span<const Index> col_ids) const {
    std::unordered_map<Index, Index> row_map;
    row_map.reserve(row_ids.size());
    for (std::size_t i = 0; i < row_ids.size(); ++i) row_map.emplace(row_ids[i], static_cast<Index>(i));
    std::vector<std::pair<Index, Index>> entries;
    for (std::size_t j = 0; j < col_ids.size(); ++j) {
        for (Index r : col(col_ids[j])) {
            auto it = row_map.find(r);
            if (it != row_map.end()) entries.emplace_back(it->second, static_cast<Index>(j));
        }
    }
    return from_entries(row_ids.size(), col_ids.size(), entries);
}

std::vector<std::vector<std::uint8_t>> SparseBinaryMatrix::to_dense() const {
    std::vector<std::vector<std::uint8_t>> dense(num_rows_, std::vector<std::uint8_t>(num_cols_, 0));
    for (std::size_t r = 0; r < num_rows_; ++r) {
        for (Index c : row_lists_[r]) dense[r][c] = 1;
    }
    return dense;
}

SparseBinaryMatrix multiply(const SparseBinaryMatrix& a, const SparseBinaryMatrix& b) {
    if (a.cols() != b.rows()) throw Error(ErrorCode::invalid_argument, "dimension mismatch in product");
    std::vector<std::vector<Index>> columns(b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) columns[c] = a.multiply(b.col(c));
    return SparseBinaryMatrix::from_columns(a.rows(), columns);
}

SparseBinaryMatrix kron(const SparseBinaryMatrix& a, const SparseBinaryMatrix& b) {
    std::vector<std::pair<Index, Index>> entries;
    entries.reserve(a.nnz() * b.nnz());
    for (std::size_t ar = 0; ar < a.rows(); ++ar) {
        for (Index ac : a.row(ar)) {
            for (std::size_t br = 0; br < b.rows(); ++br) {
                for (Index bc : b.row(br)) {
                    entries.emplace_back(static_cast<Index>(ar * b.rows() + br),
                                         static_cast<Index>(ac * b.cols() + bc));
                }
            }
        }
    }
    return SparseBinaryMatrix::from_entries(a.rows() * b.rows(), a.cols() * b.cols(), entries);
}

SparseBinaryMatrix hstack(const SparseBinaryMatrix& a, const SparseBinaryMatrix& b) {
    if (a.rows() != b.rows()) throw Error(ErrorCode::invalid_argument, "row mismatch in hstack");
    std::vector<std::pair<Index, Index>> entries;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (Index c : a.row(r)) entries.emplace_back(static_cast<Index>(r), c);
        for (Index c : b.row(r)) entries.emplace_back(static_cast<Index>(r), static_cast<Index>(c + a.cols()));
    }
    return SparseBinaryMatrix::from_entries(a.rows(), a.cols() + b.cols(), entries);
}

SparseBinaryMatrix vstack(const SparseBinaryMatrix& a, const SparseBinaryMatrix& b) {
    return hstack(a.transpose(), b.transpose()).transpose();
}

std::vector<Index> xor_support(std::span<const Index> a, std::span<const Index> b) {
    std::vector<Index> out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// ---------------------------------------------------------------------------
// OtfFactorization

OtfFactorization OtfFactorization::decompose(const SparseBinaryMatrix& m) {
    OtfFactorization f;
    for (std::size_t r = 0; r < m.rows(); ++r) f.add_row(static_cast<Index>(r));
    for (std::size_t c = 0; c < m.cols(); ++c) f.add_column(static_cast<Index>(c), m.col(c));
    return f;
}

Index OtfFactorization::add_row(Index global_row) {
    auto [it, inserted] = row_local_.try_emplace(global_row, static_cast<Index>(row_global_.size()));
    if (inserted) {
        row_global_.push_back(global_row);
        row_pivot_.push_back(-1);
        syndrome_.push_back(0);
        scratch_.push_back(0);
    }
    return it->second;
}

void OtfFactorization::toggle_syndrome_row(Index global_row) {
    const Index local = add_row(global_row);
    const std::vector<Index> unit{local};
    for (Index r : reduce(unit)) {
        syndrome_[r] ^= 1U;
        if (row_pivot_[r] < 0) {
            if (syndrome_[r]) ++residue_count_;
            else --residue_count_;
        }
    }
}

std::vector<Index> OtfFactorization::reduce(std::span<const Index> local_rows) const {
    // Pivots are replayed in creation order, but only those whose pivot row
    // is hit. A min-heap of pivot indices keeps the order; targets of pivot k
    // that are themselves later pivots get queued when they light up.
    std::vector<Index> touched;
    std::priority_queue<std::int32_t, std::vector<std::int32_t>, std::greater<>> pending;
    auto toggle = [&](Index r) {
        if (!scratch_[r] ) touched.push_back(r);
        scratch_[r] ^= 1U;
    };
    for (Index r : local_rows) toggle(r);
    for (Index r : local_rows) {
        if (scratch_[r] && row_pivot_[r] >= 0) pending.push(row_pivot_[r]);
    }
    std::int32_t last = -1;
    while (!pending.empty()) {
        const std::int32_t k = pending.top();
        pending.pop();
        if (k == last) continue;
        last = k;
        if (!scratch_[pivot_row_[k]]) continue;
        for (std::size_t i = elim_begin_[k]; i < elim_begin_[k + 1]; ++i) {
            const Index t = elim_targets_[i];
            toggle(t);
            if (scratch_[t] && row_pivot_[t] > k) pending.push(row_pivot_[t]);
        }
    }
    std::vector<Index> out;
    for (Index r : touched) {
        if (scratch_[r]) {
            out.push_back(r);
            scratch_[r] = 0;
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

OtfFactorization::AddResult OtfFactorization::add_column(Index col_id, std::span<const Index> support) {
    if (col_local_.contains(col_id)) {
        throw Error(ErrorCode::duplicate_column, "column " + std::to_string(col_id) + " already present");
    }
    std::vector<Index> sorted(support.begin(), support.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorCode::invalid_argument, "column support has repeated rows");
    }
    std::vector<Index> local;
    local.reserve(sorted.size());
    for (Index r : sorted) local.push_back(add_row(r));

    std::vector<Index> reduced = reduce(local);

    const Index position = static_cast<Index>(col_global_.size());
    col_global_.push_back(col_id);
    col_local_.emplace(col_id, position);
    ++columns_eliminated_;

    // Lowest unpivoted local row with a residue becomes the new pivot.
    std::optional<Index> pivot;
    for (Index r : reduced) {
        if (row_pivot_[r] < 0) {
            pivot = r;
            break;
        }
    }

    AddResult result;
    result.reduced_weight = reduced.size();
    if (!pivot) {
        col_pivot_.push_back(-1);
        u_cols_.push_back(std::move(reduced));
        return result;
    }

    const auto k = static_cast<std::int32_t>(pivot_row_.size());
    std::vector<Index> upper;
    for (Index r : reduced) {
        if (r == *pivot || row_pivot_[r] >= 0) {
            upper.push_back(r);
        } else {
            elim_targets_.push_back(r);
            ++result.ops_appended;
        }
    }
    pivot_row_.push_back(*pivot);
    pivot_col_.push_back(position);
    elim_begin_.push_back(elim_targets_.size());

    if (syndrome_[*pivot]) {
        for (std::size_t i = elim_begin_[k]; i < elim_begin_[k + 1]; ++i) {
            const Index t = elim_targets_[i];
            syndrome_[t] ^= 1U;
            if (syndrome_[t]) ++residue_count_;
            else --residue_count_;
        }
        --residue_count_;  // the pivot row leaves the residue set
    }
    row_pivot_[*pivot] = k;
    col_pivot_.push_back(k);
    u_cols_.push_back(std::move(upper));
    result.new_pivot = true;
    return result;
}

void OtfFactorization::absorb(OtfFactorization&& other) {
    for (Index r : other.row_global_) {
        if (row_local_.contains(r)) {
            throw Error(ErrorCode::overlapping_rows,
                        "row " + std::to_string(r) + " is enclosed by both factorizations");
        }
    }
    for (Index c : other.col_global_) {
        if (col_local_.contains(c)) {
            throw Error(ErrorCode::duplicate_column, "column " + std::to_string(c) + " present in both");
        }
    }
    const auto row_offset = static_cast<Index>(row_global_.size());
    const auto col_offset = static_cast<Index>(col_global_.size());
    const auto pivot_offset = static_cast<std::int32_t>(pivot_row_.size());

    for (std::size_t r = 0; r < other.row_global_.size(); ++r) {
        row_global_.push_back(other.row_global_[r]);
        row_local_.emplace(other.row_global_[r], static_cast<Index>(row_offset + r));
        row_pivot_.push_back(other.row_pivot_[r] < 0 ? -1 : other.row_pivot_[r] + pivot_offset);
        syndrome_.push_back(other.syndrome_[r]);
        scratch_.push_back(0);
    }
    const std::size_t target_offset = elim_targets_.size();
    for (std::size_t k = 0; k < other.pivot_row_.size(); ++k) {
        pivot_row_.push_back(other.pivot_row_[k] + row_offset);
        pivot_col_.push_back(other.pivot_col_[k] + col_offset);
        elim_begin_.push_back(other.elim_begin_[k + 1] + target_offset);
    }
    for (Index t : other.elim_targets_) elim_targets_.push_back(t + row_offset);
    for (std::size_t c = 0; c < other.col_global_.size(); ++c) {
        col_global_.push_back(other.col_global_[c]);
        col_local_.emplace(other.col_global_[c], static_cast<Index>(col_offset + c));
        col_pivot_.push_back(other.col_pivot_[c] < 0 ? -1 : other.col_pivot_[c] + pivot_offset);
        std::vector<Index> translated;
        translated.reserve(other.u_cols_[c].size());
        for (Index r : other.u_cols_[c]) translated.push_back(r + row_offset);
        u_cols_.push_back(std::move(translated));
    }
    residue_count_ += other.residue_count_;
    columns_eliminated_ += other.columns_eliminated_;
    other = OtfFactorization{};
}

OtfFactorization OtfFactorization::merge(OtfFactorization a, OtfFactorization b, Index bridge_col,
                                         std::span<const Index> support) {
    a.absorb(std::move(b));
    a.add_column(bridge_col, support);
    return a;
}

std::vector<Index> OtfFactorization::to_local(std::span<const Index> global_rows, bool& outside) const {
    outside = false;
    std::vector<Index> local;
    local.reserve(global_rows.size());
    for (Index r : global_rows) {
        auto it = row_local_.find(r);
        if (it == row_local_.end()) {
            outside = true;
            continue;
        }
        local.push_back(it->second);
    }
    // Repeated rows cancel.
    std::sort(local.begin(), local.end());
    std::vector<Index> dedup;
    for (std::size_t i = 0; i < local.size();) {
        std::size_t j = i;
        while (j < local.size() && local[j] == local[i]) ++j;
        if ((j - i) % 2 == 1) dedup.push_back(local[i]);
        i = j;
    }
    return dedup;
}

bool OtfFactorization::in_image(std::span<const Index> s) const {
    bool outside = false;
    const auto local = to_local(s, outside);
    if (outside) return false;
    for (Index r : reduce(local)) {
        if (row_pivot_[r] < 0) return false;
    }
    return true;
}

std::vector<Index> OtfFactorization::back_substitute(std::vector<Index> reduced) const {
    for (Index r : reduced) {
        if (row_pivot_[r] < 0) throw Error(ErrorCode::not_in_image, "right-hand side is not in the image");
    }
    for (Index r : reduced) scratch_[r] = 1;
    std::vector<Index> solution;
    for (std::size_t k = pivot_row_.size(); k-- > 0;) {
        if (!scratch_[pivot_row_[k]]) continue;
        const Index position = pivot_col_[k];
        solution.push_back(col_global_[position]);
        for (Index r : u_cols_[position]) {
            scratch_[r] ^= 1U;
            if (scratch_[r]) reduced.push_back(r);
        }
    }
    for (Index r : reduced) scratch_[r] = 0;
    std::sort(solution.begin(), solution.end());
    return solution;
}

std::vector<Index> OtfFactorization::solve(std::span<const Index> s) const {
    bool outside = false;
    const auto local = to_local(s, outside);
    if (outside) throw Error(ErrorCode::not_in_image, "right-hand side has support outside the row universe");
    return back_substitute(reduce(local));
}

std::vector<Index> OtfFactorization::solve_syndrome() const {
    return back_substitute(eliminated_syndrome());
}

std::vector<Index> OtfFactorization::eliminated_syndrome() const {
    std::vector<Index> out;
    for (std::size_t r = 0; r < syndrome_.size(); ++r) {
        if (syndrome_[r]) out.push_back(static_cast<Index>(r));
    }
    return out;
}

std::optional<Index> OtfFactorization::pivot_row_of(std::size_t col_position) const {
    const std::int32_t k = col_pivot_.at(col_position);
    if (k < 0) return std::nullopt;
    return pivot_row_[k];
}

std::vector<std::size_t> OtfFactorization::dependent_cols() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < col_pivot_.size(); ++c) {
        if (col_pivot_[c] < 0) out.push_back(c);
    }
    return out;
}

std::vector<Index> OtfFactorization::pivot_columns() const {
    std::vector<Index> out;
    out.reserve(pivot_col_.size());
    for (Index position : pivot_col_) out.push_back(col_global_[position]);
    return out;
}

std::vector<OtfFactorization::RowOp> OtfFactorization::rowop_log() const {
    std::vector<RowOp> log;
    log.reserve(elim_targets_.size());
    for (std::size_t k = 0; k < pivot_row_.size(); ++k) {
        for (std::size_t i = elim_begin_[k]; i < elim_begin_[k + 1]; ++i) {
            log.push_back({elim_targets_[i], pivot_row_[k]});
        }
    }
    return log;
}

}  // namespace lsd
