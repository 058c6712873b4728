#pragma once

// Compressed-row sparse matrices and the dense vector kernels the solver
// stack is built from.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace igamg {

using Index = std::int32_t;
using Vector = std::vector<double>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Square or rectangular matrix in canonical CSR form: column indices strictly
/// increasing inside every row, no duplicates. Immutable once built.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Takes ownership of raw CSR arrays and validates the canonical form.
  /// With `symmetric` set the matrix is additionally checked for exact
  /// value symmetry and the hint is recorded.
  SparseMatrix(Index n_rows, Index n_cols, std::vector<std::size_t> row_offsets,
               std::vector<Index> col_indices, std::vector<double> values,
               bool symmetric = false);

  /// Sorts and merges duplicate entries by summation.
  static SparseMatrix from_triplets(Index n_rows, Index n_cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(Index n);

  Index rows() const { return n_rows_; }
  Index cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }
  bool symmetric_hint() const { return symmetric_; }

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const Index> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  std::span<const Index> row_cols(Index i) const {
    return {col_indices_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  std::span<const double> row_values(Index i) const {
    return {values_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }

  /// Stored value at (i, j), zero when the entry is structurally absent.
  double coeff(Index i, Index j) const;
  Vector diagonal() const;

  /// Largest |a_ij - a_ji| over all stored entries.
  double max_asymmetry() const;

  /// Sets the symmetry hint; throws DimensionError unless exactly symmetric.
  void mark_symmetric();

 private:
  friend class SparseMatrixBuilder;

  Index n_rows_ = 0;
  Index n_cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<Index> col_indices_;
  std::vector<double> values_;
  bool symmetric_ = false;
};

/// Fixed-pattern accumulator: the sparsity pattern is fixed up front and
/// values are summed into it, which is how the assembler inserts element
/// contributions without a triplet stream.
class SparseMatrixBuilder {
 public:
  /// `pattern[i]` lists the columns of row i; it is sorted and deduplicated.
  SparseMatrixBuilder(Index n_rows, Index n_cols, std::vector<std::vector<Index>> pattern);

  /// Adds `value` into (i, j); the entry must be part of the pattern.
  /// `hint` is the position returned by the previous call on the same row
  /// and makes runs of consecutive columns O(1).
  std::size_t add(Index i, Index j, double value, std::size_t hint = 0);

  /// Finalizes; with `symmetrize` the result is replaced by (A + A^T) / 2.
  SparseMatrix build(bool symmetrize = false) &&;

 private:
  SparseMatrix matrix_;
};

SparseMatrix transpose(const SparseMatrix& a);
/// Sparse-sparse product via row-wise Gustavson accumulation.
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
/// alpha * A + beta * B on the union pattern.
SparseMatrix add(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b);
/// (A + A^T) / 2 with the symmetry hint set.
SparseMatrix symmetrize(const SparseMatrix& a);
/// Extracts the block selected by the maps: row_map[i] is the new row of
/// old row i, or -1 to drop it (likewise col_map).
SparseMatrix submatrix(const SparseMatrix& a, std::span<const Index> row_map,
                       std::span<const Index> col_map, Index n_rows, Index n_cols);

/// y = A x, rows summed in ascending column order.
Vector spmv(const SparseMatrix& a, std::span<const double> x);
void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
/// y = f - A x
void residual(const SparseMatrix& a, std::span<const double> f, std::span<const double> x,
              std::span<double> y);

/// y <- alpha x + beta y
void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);

/// Galerkin triple product P^T K P, symmetrized.
SparseMatrix rap(const SparseMatrix& p, const SparseMatrix& k);

/// d_i = k_ii + sum_{j != i} |k_ij|. Throws if any d_i <= 0.
Vector l1_diagonal(const SparseMatrix& k);

/// Throws std::domain_error naming `what` if any entry is NaN or infinite.
void require_finite(std::span<const double> x, const std::string& what);

}  // namespace igamg
