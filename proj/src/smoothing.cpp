#include "igamg/smoothing.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace igamg {

namespace {

void check_lengths(const SparseMatrix& k, const SmootherState& s, std::size_t f, std::size_t x) {
  const auto n = static_cast<std::size_t>(k.rows());
  if (s.dhat.size() != n || f != n || x != n) {
    throw DimensionError("smoother: operand lengths do not match the matrix");
  }
}

}  // namespace

SmootherState SmootherState::l1_jacobi(const SparseMatrix& k) {
  SmootherState s;
  s.kind = SmootherKind::L1Jacobi;
  s.dhat = l1_diagonal(k);
  return s;
}

SmootherState SmootherState::chebyshev(const SparseMatrix& k, int degree) {
  if (degree < 1) throw std::invalid_argument("Chebyshev degree must be at least 1");
  SmootherState s;
  s.kind = SmootherKind::ChebyshevL1;
  s.dhat = l1_diagonal(k);
  s.degree = degree;
  return s;
}

SmootherState SmootherState::weighted_jacobi(const SparseMatrix& k, double omega) {
  SmootherState s;
  s.kind = SmootherKind::WeightedJacobi;
  s.dhat = k.diagonal();
  for (double d : s.dhat) {
    if (!(d > 0.0)) throw std::domain_error("weighted Jacobi: nonpositive diagonal entry");
  }
  s.omega = omega;
  return s;
}

Vector l1_jacobi_sweeps(const SparseMatrix& k, const SmootherState& s, std::span<const double> f,
                        std::span<const double> x0, int nu) {
  Vector x(x0.begin(), x0.end());
  SmootherState l1 = s;
  l1.kind = SmootherKind::L1Jacobi;
  smooth(k, l1, f, x, nu);
  return x;
}

Vector chebyshev_apply(const SparseMatrix& k, const SmootherState& s, std::span<const double> f,
                       std::span<const double> x0) {
  if (s.kind != SmootherKind::ChebyshevL1) {
    throw std::invalid_argument("chebyshev_apply: smoother state is not Chebyshev");
  }
  Vector x(x0.begin(), x0.end());
  smooth(k, s, f, x, 1);
  return x;
}

void smooth(const SparseMatrix& k, const SmootherState& s, std::span<const double> f,
            std::span<double> x, int sweeps) {
  check_lengths(k, s, f.size(), x.size());
  const std::size_t n = x.size();
  Vector r(n);
  switch (s.kind) {
    case SmootherKind::L1Jacobi:
    case SmootherKind::WeightedJacobi: {
      const double w = s.kind == SmootherKind::WeightedJacobi ? s.omega : 1.0;
      for (int it = 0; it < sweeps; ++it) {
        residual(k, f, x, r);
        for (std::size_t i = 0; i < n; ++i) x[i] += w * r[i] / s.dhat[i];
      }
      return;
    }
    case SmootherKind::ChebyshevL1: {
      Vector d(n), kd(n);
      const int m = s.degree;
      for (int it = 0; it < sweeps; ++it) {
        residual(k, f, x, r);
        const double c0 = 4.0 / (3.0 * s.rho);
        for (std::size_t i = 0; i < n; ++i) d[i] = c0 * r[i] / s.dhat[i];
        for (int j = 1; j < m; ++j) {
          spmv(k, d, kd);
          const double a = (2.0 * j - 1.0) / (2.0 * j + 3.0);
          const double b = (8.0 * j + 4.0) / ((2.0 * j + 3.0) * s.rho);
          for (std::size_t i = 0; i < n; ++i) {
            x[i] += d[i];
            r[i] -= kd[i];
            d[i] = a * d[i] + b * r[i] / s.dhat[i];
          }
        }
        for (std::size_t i = 0; i < n; ++i) x[i] += d[i];
      }
      return;
    }
  }
}

double estimate_lambda_max(const SparseMatrix& k, std::span<const double> d, int iters,
                           std::uint64_t seed) {
  const std::size_t n = static_cast<std::size_t>(k.rows());
  if (d.size() != n) throw DimensionError("estimate_lambda_max: diagonal length mismatch");
  if (n == 0) return 0.0;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector x(n), kx(n);
  for (auto& v : x) v = dist(gen);
  double lambda = 0.0;
  for (int it = 0; it <= iters; ++it) {
    spmv(k, x, kx);
    // Rayleigh quotient in the D inner product, where D^-1 K is self-adjoint.
    double xkx = 0.0, xdx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      xkx += x[i] * kx[i];
      xdx += d[i] * x[i] * x[i];
    }
    if (xdx == 0.0) break;
    lambda = xkx / xdx;
    if (it == iters) break;
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = kx[i] / d[i];
      norm = std::max(norm, std::abs(x[i]));
    }
    if (norm == 0.0) break;
    for (auto& v : x) v /= norm;
  }
  return 1.1 * lambda;
}

int default_chebyshev_degree(int p) {
  if (p <= 3) return 8;
  if (p == 4) return 12;
  if (p == 5) return 14;
  return 16;
}

CoarseSolver::CoarseSolver(const SparseMatrix& k, CoarseSolveConfig cfg, std::uint64_t seed)
    : cfg_(cfg) {
  if (cfg_.mode == CoarseMode::Pcg) {
    const Vector diag = k.diagonal();
    const double lambda = estimate_lambda_max(k, diag, 20, seed);
    jacobi_ = SmootherState::weighted_jacobi(k, lambda > 0.0 ? 4.0 / (3.0 * lambda) : 1.0);
  } else {
    l1_ = SmootherState::l1_jacobi(k);
  }
}

CoarseSolveResult CoarseSolver::solve(const SparseMatrix& k, std::span<const double> f) const {
  const std::size_t n = static_cast<std::size_t>(k.rows());
  if (f.size() != n) throw DimensionError("coarse solve: right-hand side length mismatch");
  CoarseSolveResult out;
  out.x.assign(n, 0.0);
  const double fnorm = norm2(f);
  if (fnorm == 0.0) return out;

  if (cfg_.mode == CoarseMode::L1Jacobi30) {
    smooth(k, l1_, f, out.x, cfg_.l1_sweeps);
    out.iterations = cfg_.l1_sweeps;
    Vector r(n);
    residual(k, f, out.x, r);
    out.relative_residual = norm2(r) / fnorm;
    return out;
  }

  // CG preconditioned by one weighted-Jacobi sweep from zero.
  Vector r(f.begin(), f.end()), z(n), p(n), q(n);
  auto precondition = [&] {
    for (std::size_t i = 0; i < n; ++i) z[i] = jacobi_.omega * r[i] / jacobi_.dhat[i];
  };
  precondition();
  p = z;
  double rz = dot(r, z);
  out.relative_residual = 1.0;
  for (int it = 1; it <= cfg_.maxit; ++it) {
    spmv(k, p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    axpby(alpha, p, 1.0, out.x);
    axpby(-alpha, q, 1.0, r);
    out.iterations = it;
    out.relative_residual = norm2(r) / fnorm;
    if (out.relative_residual <= cfg_.rtol) break;
    precondition();
    const double rz_new = dot(r, z);
    axpby(1.0, z, rz_new / rz, p);
    rz = rz_new;
  }
  return out;
}

CoarseSolveResult coarse_solve(const SparseMatrix& k, std::span<const double> f,
                               const CoarseSolveConfig& cfg, std::uint64_t seed) {
  return CoarseSolver(k, cfg, seed).solve(k, f);
}

}  // namespace igamg
