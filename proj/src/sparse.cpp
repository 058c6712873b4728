#include "igamg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace igamg {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

}  // namespace

SparseMatrix::SparseMatrix(Index n_rows, Index n_cols, std::vector<std::size_t> row_offsets,
                           std::vector<Index> col_indices, std::vector<double> values,
                           bool symmetric)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (n_rows < 0 || n_cols < 0) throw DimensionError("SparseMatrix: negative dimension");
  if (row_offsets_.size() != static_cast<std::size_t>(n_rows) + 1 || row_offsets_.front() != 0) {
    throw DimensionError("SparseMatrix: row_offsets must have n_rows + 1 entries starting at 0");
  }
  if (row_offsets_.back() != col_indices_.size() || col_indices_.size() != values_.size()) {
    throw DimensionError("SparseMatrix: row_offsets[n_rows] must equal the number of entries");
  }
  for (Index i = 0; i < n_rows; ++i) {
    if (row_offsets_[i] > row_offsets_[i + 1]) {
      throw DimensionError("SparseMatrix: row_offsets not nondecreasing at row " +
                           std::to_string(i));
    }
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] < 0 || col_indices_[k] >= n_cols) {
        throw DimensionError("SparseMatrix: column index out of range in row " + std::to_string(i));
      }
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1]) {
        throw DimensionError("SparseMatrix: columns not strictly increasing in row " +
                             std::to_string(i));
      }
    }
  }
  if (symmetric) mark_symmetric();
}

SparseMatrix SparseMatrix::from_triplets(Index n_rows, Index n_cols,
                                         std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols) {
      throw DimensionError("from_triplets: entry (" + std::to_string(t.row) + ", " +
                           std::to_string(t.col) + ") out of range");
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> offsets(static_cast<std::size_t>(n_rows) + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  Index last_row = -1;
  Index last_col = -1;
  for (const auto& t : triplets) {
    if (t.row == last_row && t.col == last_col) {
      vals.back() += t.value;
      continue;
    }
    cols.push_back(t.col);
    vals.push_back(t.value);
    ++offsets[t.row + 1];
    last_row = t.row;
    last_col = t.col;
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<std::size_t> offsets(static_cast<std::size_t>(n) + 1);
  std::iota(offsets.begin(), offsets.end(), std::size_t{0});
  std::vector<Index> cols(n);
  std::iota(cols.begin(), cols.end(), Index{0});
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), Vector(n, 1.0), true);
}

double SparseMatrix::coeff(Index i, Index j) const {
  auto cols = row_cols(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[row_offsets_[i] + static_cast<std::size_t>(it - cols.begin())];
}

Vector SparseMatrix::diagonal() const {
  Vector d(std::min(n_rows_, n_cols_), 0.0);
  for (Index i = 0; i < static_cast<Index>(d.size()); ++i) d[i] = coeff(i, i);
  return d;
}

double SparseMatrix::max_asymmetry() const {
  if (n_rows_ != n_cols_) throw DimensionError("max_asymmetry: matrix is not square");
  double worst = 0.0;
  for (Index i = 0; i < n_rows_; ++i) {
    auto cols = row_cols(i);
    auto vals = row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] <= i) continue;
      worst = std::max(worst, std::abs(vals[k] - coeff(cols[k], i)));
    }
    // Entries whose transpose is not stored count with their full magnitude;
    // they are covered when the lower-triangle side is visited.
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] >= i) break;
      auto tc = row_cols(cols[k]);
      if (!std::binary_search(tc.begin(), tc.end(), i)) worst = std::max(worst, std::abs(vals[k]));
    }
  }
  return worst;
}

SparseMatrixBuilder::SparseMatrixBuilder(Index n_rows, Index n_cols,
                                         std::vector<std::vector<Index>> pattern) {
  if (pattern.size() != static_cast<std::size_t>(n_rows)) {
    throw DimensionError("SparseMatrixBuilder: pattern must have one entry per row");
  }
  std::vector<std::size_t> offsets(static_cast<std::size_t>(n_rows) + 1, 0);
  for (Index i = 0; i < n_rows; ++i) {
    auto& row = pattern[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    offsets[i + 1] = offsets[i] + row.size();
  }
  std::vector<Index> cols;
  cols.reserve(offsets.back());
  for (auto& row : pattern) {
    cols.insert(cols.end(), row.begin(), row.end());
    std::vector<Index>().swap(row);
  }
  Vector vals(cols.size(), 0.0);
  matrix_ = SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

std::size_t SparseMatrixBuilder::add(Index i, Index j, double value, std::size_t hint) {
  const auto& offsets = matrix_.row_offsets_;
  const auto& cols = matrix_.col_indices_;
  const std::size_t begin = offsets[i];
  const std::size_t end = offsets[i + 1];
  std::size_t pos;
  if (hint >= begin && hint < end && cols[hint] == j) {
    pos = hint;
  } else if (hint + 1 >= begin && hint + 1 < end && cols[hint + 1] == j) {
    pos = hint + 1;
  } else {
    auto it = std::lower_bound(cols.begin() + begin, cols.begin() + end, j);
    if (it == cols.begin() + end || *it != j) {
      throw std::logic_error("SparseMatrixBuilder: entry (" + std::to_string(i) + ", " +
                             std::to_string(j) + ") is not in the pattern");
    }
    pos = static_cast<std::size_t>(it - cols.begin());
  }
  matrix_.values_[pos] += value;
  return pos;
}

SparseMatrix SparseMatrixBuilder::build(bool symmetrize_result) && {
  if (symmetrize_result) {
    if (matrix_.rows() == matrix_.cols() && matrix_.max_asymmetry() == 0.0) {
      matrix_.symmetric_ = true;
      return std::move(matrix_);
    }
    return symmetrize(matrix_);
  }
  return std::move(matrix_);
}

SparseMatrix transpose(const SparseMatrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  std::vector<std::size_t> offsets(static_cast<std::size_t>(n) + 1, 0);
  for (Index c : a.col_indices()) ++offsets[c + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<Index> cols(a.nnz());
  Vector vals(a.nnz());
  std::vector<std::size_t> next(offsets.begin(), offsets.end() - 1);
  for (Index i = 0; i < m; ++i) {
    auto rc = a.row_cols(i);
    auto rv = a.row_values(i);
    for (std::size_t k = 0; k < rc.size(); ++k) {
      const std::size_t dst = next[rc[k]]++;
      cols[dst] = i;
      vals[dst] = rv[k];
    }
  }
  return SparseMatrix(n, m, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("multiply: inner dimensions differ (" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + ")");
  }
  const Index m = a.rows();
  const Index n = b.cols();
  std::vector<std::size_t> offsets(static_cast<std::size_t>(m) + 1, 0);
  std::vector<Index> cols;
  Vector vals;
  cols.reserve(a.nnz());
  vals.reserve(a.nnz());

  Vector acc(n, 0.0);
  std::vector<Index> marker(n, -1);
  std::vector<Index> touched;
  for (Index i = 0; i < m; ++i) {
    touched.clear();
    auto ac = a.row_cols(i);
    auto av = a.row_values(i);
    for (std::size_t ka = 0; ka < ac.size(); ++ka) {
      const double aik = av[ka];
      auto bc = b.row_cols(ac[ka]);
      auto bv = b.row_values(ac[ka]);
      for (std::size_t kb = 0; kb < bc.size(); ++kb) {
        const Index j = bc[kb];
        if (marker[j] != i) {
          marker[j] = i;
          acc[j] = 0.0;
          touched.push_back(j);
        }
        acc[j] += aik * bv[kb];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (Index j : touched) {
      cols.push_back(j);
      vals.push_back(acc[j]);
    }
    offsets[i + 1] = cols.size();
  }
  cols.shrink_to_fit();
  vals.shrink_to_fit();
  return SparseMatrix(m, n, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix add(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("add: shapes differ");
  }
  const Index m = a.rows();
  std::vector<std::size_t> offsets(static_cast<std::size_t>(m) + 1, 0);
  std::vector<Index> cols;
  Vector vals;
  cols.reserve(std::max(a.nnz(), b.nnz()));
  vals.reserve(std::max(a.nnz(), b.nnz()));
  for (Index i = 0; i < m; ++i) {
    auto ac = a.row_cols(i);
    auto av = a.row_values(i);
    auto bc = b.row_cols(i);
    auto bv = b.row_values(i);
    std::size_t ka = 0;
    std::size_t kb = 0;
    while (ka < ac.size() || kb < bc.size()) {
      if (kb == bc.size() || (ka < ac.size() && ac[ka] < bc[kb])) {
        cols.push_back(ac[ka]);
        vals.push_back(alpha * av[ka++]);
      } else if (ka == ac.size() || bc[kb] < ac[ka]) {
        cols.push_back(bc[kb]);
        vals.push_back(beta * bv[kb++]);
      } else {
        cols.push_back(ac[ka]);
        vals.push_back(alpha * av[ka++] + beta * bv[kb++]);
      }
    }
    offsets[i + 1] = cols.size();
  }
  return SparseMatrix(m, a.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix symmetrize(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("symmetrize: matrix is not square");
  SparseMatrix s = add(0.5, a, 0.5, transpose(a));
  // 0.5 * (a + b) and 0.5 * (b + a) round identically, so the check is exact.
  s.mark_symmetric();
  return s;
}

void SparseMatrix::mark_symmetric() {
  if (n_rows_ != n_cols_ || max_asymmetry() != 0.0) {
    throw DimensionError("SparseMatrix: symmetric hint set on a non-symmetric matrix");
  }
  symmetric_ = true;
}

SparseMatrix submatrix(const SparseMatrix& a, std::span<const Index> row_map,
                       std::span<const Index> col_map, Index n_rows, Index n_cols) {
  require_same_length(row_map.size(), static_cast<std::size_t>(a.rows()), "submatrix rows");
  require_same_length(col_map.size(), static_cast<std::size_t>(a.cols()), "submatrix cols");
  std::vector<std::size_t> offsets(static_cast<std::size_t>(n_rows) + 1, 0);
  std::vector<Index> cols;
  Vector vals;
  std::vector<Index> order(n_rows, -1);
  for (Index i = 0; i < a.rows(); ++i) {
    if (row_map[i] >= 0) order[row_map[i]] = i;
  }
  std::vector<std::pair<Index, double>> row;
  for (Index r = 0; r < n_rows; ++r) {
    const Index i = order[r];
    if (i < 0) throw DimensionError("submatrix: row map does not cover every output row");
    row.clear();
    auto rc = a.row_cols(i);
    auto rv = a.row_values(i);
    for (std::size_t k = 0; k < rc.size(); ++k) {
      if (col_map[rc[k]] >= 0) row.emplace_back(col_map[rc[k]], rv[k]);
    }
    std::sort(row.begin(), row.end());
    for (auto [c, v] : row) {
      cols.push_back(c);
      vals.push_back(v);
    }
    offsets[r + 1] = cols.size();
  }
  return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

Vector spmv(const SparseMatrix& a, std::span<const double> x) {
  Vector y(a.rows());
  spmv(a, x, y);
  return y;
}

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  require_same_length(x.size(), static_cast<std::size_t>(a.cols()), "spmv input");
  require_same_length(y.size(), static_cast<std::size_t>(a.rows()), "spmv output");
  const auto offsets = a.row_offsets();
  const Index* cols = a.col_indices().data();
  const double* vals = a.values().data();
  for (Index i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) s += vals[k] * x[cols[k]];
    y[i] = s;
  }
}

void residual(const SparseMatrix& a, std::span<const double> f, std::span<const double> x,
              std::span<double> y) {
  require_same_length(f.size(), static_cast<std::size_t>(a.rows()), "residual rhs");
  spmv(a, x, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = f[i] - y[i];
}

void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y) {
  require_same_length(x.size(), y.size(), "axpby");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = alpha * x[i] + beta * y[i];
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same_length(x.size(), y.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

SparseMatrix rap(const SparseMatrix& p, const SparseMatrix& k) {
  if (k.rows() != k.cols()) throw DimensionError("rap: K is not square");
  if (p.rows() != k.rows()) {
    throw DimensionError("rap: P has " + std::to_string(p.rows()) + " rows, K has " +
                         std::to_string(k.rows()));
  }
  // Row-wise triple product: row I of P^T K is formed in a dense
  // accumulator and immediately multiplied by P, so K P is never stored.
  const SparseMatrix pt = transpose(p);
  const Index n = k.rows();
  const Index nc = p.cols();
  std::vector<std::size_t> offsets(static_cast<std::size_t>(nc) + 1, 0);
  std::vector<Index> cols;
  Vector vals;
  Vector acc1(n, 0.0), acc2(nc, 0.0);
  std::vector<Index> mark1(n, -1), mark2(nc, -1);
  std::vector<Index> touched1, touched2;
  for (Index ci = 0; ci < nc; ++ci) {
    touched1.clear();
    touched2.clear();
    auto pc = pt.row_cols(ci);
    auto pv = pt.row_values(ci);
    for (std::size_t a = 0; a < pc.size(); ++a) {
      auto kc = k.row_cols(pc[a]);
      auto kv = k.row_values(pc[a]);
      for (std::size_t b = 0; b < kc.size(); ++b) {
        const Index j = kc[b];
        if (mark1[j] != ci) {
          mark1[j] = ci;
          acc1[j] = 0.0;
          touched1.push_back(j);
        }
        acc1[j] += pv[a] * kv[b];
      }
    }
    std::sort(touched1.begin(), touched1.end());
    for (Index j : touched1) {
      auto rc = p.row_cols(j);
      auto rv = p.row_values(j);
      for (std::size_t b = 0; b < rc.size(); ++b) {
        const Index cj = rc[b];
        if (mark2[cj] != ci) {
          mark2[cj] = ci;
          acc2[cj] = 0.0;
          touched2.push_back(cj);
        }
        acc2[cj] += acc1[j] * rv[b];
      }
    }
    std::sort(touched2.begin(), touched2.end());
    for (Index cj : touched2) {
      cols.push_back(cj);
      vals.push_back(acc2[cj]);
    }
    offsets[ci + 1] = cols.size();
  }
  cols.shrink_to_fit();
  vals.shrink_to_fit();
  return symmetrize(SparseMatrix(nc, nc, std::move(offsets), std::move(cols), std::move(vals)));
}

Vector l1_diagonal(const SparseMatrix& k) {
  if (k.rows() != k.cols()) throw DimensionError("l1_diagonal: matrix is not square");
  Vector d(k.rows(), 0.0);
  for (Index i = 0; i < k.rows(); ++i) {
    auto rc = k.row_cols(i);
    auto rv = k.row_values(i);
    double s = 0.0;
    for (std::size_t q = 0; q < rc.size(); ++q) s += rc[q] == i ? rv[q] : std::abs(rv[q]);
    if (!(s > 0.0)) {
      throw std::domain_error("l1_diagonal: nonpositive entry at row " + std::to_string(i) +
                              " (matrix is not SPD)");
    }
    d[i] = s;
  }
  return d;
}

void require_finite(std::span<const double> x, const std::string& what) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw std::domain_error(what + ": non-finite entry at index " + std::to_string(i));
    }
  }
}

}  // namespace igamg
