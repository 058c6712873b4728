#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "igamg/sparse.hpp"

namespace testing {

inline Eigen::MatrixXd to_dense(const igamg::SparseMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (igamg::Index i = 0; i < a.rows(); ++i) {
    auto c = a.row_cols(i);
    auto v = a.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) d(i, c[k]) = v[k];
  }
  return d;
}

inline igamg::SparseMatrix from_dense(const Eigen::MatrixXd& d, bool symmetric = false) {
  std::vector<igamg::Triplet> t;
  for (int i = 0; i < d.rows(); ++i) {
    for (int j = 0; j < d.cols(); ++j) {
      if (d(i, j) != 0.0) t.push_back({i, j, d(i, j)});
    }
  }
  auto a = igamg::SparseMatrix::from_triplets(static_cast<igamg::Index>(d.rows()),
                                              static_cast<igamg::Index>(d.cols()), std::move(t));
  return symmetric ? igamg::symmetrize(a) : a;
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

/// Random sparse matrix with roughly `density` of its entries set.
inline Eigen::MatrixXd random_sparse(int m, int n, double density, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), coin(0.0, 1.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (coin(gen) < density) d(i, j) = u(gen);
    }
  }
  return d;
}

/// Sparse SPD: a random symmetric sparse graph Laplacian-like matrix
/// with a positive shift.
inline Eigen::MatrixXd random_spd(int n, double density, std::mt19937_64& gen, double shift = 0.1) {
  std::uniform_real_distribution<double> u(0.1, 1.0), coin(0.0, 1.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(gen) < density) {
        const double w = u(gen) * (coin(gen) < 0.8 ? -1.0 : 1.0);
        d(i, j) = d(j, i) = w;
      }
    }
  }
  for (int i = 0; i < n; ++i) d(i, i) = d.row(i).cwiseAbs().sum() + shift + u(gen);
  return d;
}

inline bool is_spd(const Eigen::MatrixXd& d) {
  Eigen::LLT<Eigen::MatrixXd> llt(d);
  return llt.info() == Eigen::Success;
}

}  // namespace testing
