#pragma once

// Relaxation on K x = f: l1-Jacobi, weighted Jacobi and the fourth-kind
// Chebyshev polynomial of l1-Jacobi; the damped-Jacobi spectral estimate;
// the coarsest-level solver.

#include <cstdint>
#include <span>

#include "igamg/sparse.hpp"

namespace igamg {

enum class SmootherKind { L1Jacobi, WeightedJacobi, ChebyshevL1 };

struct SmootherState {
  SmootherKind kind = SmootherKind::L1Jacobi;
  Vector dhat;        ///< l1 diagonal (weighted Jacobi: plain diagonal)
  int degree = 1;     ///< Chebyshev degree
  double rho = 1.0;   ///< upper bound of the spectrum of dhat^-1 K
  double omega = 1.0; ///< weighted Jacobi damping

  static SmootherState l1_jacobi(const SparseMatrix& k);
  static SmootherState chebyshev(const SparseMatrix& k, int degree);
  static SmootherState weighted_jacobi(const SparseMatrix& k, double omega);
};

/// nu sweeps of x <- x + D^-1 (f - K x); nu = 0 returns x0.
Vector l1_jacobi_sweeps(const SparseMatrix& k, const SmootherState& s, std::span<const double> f,
                        std::span<const double> x0, int nu);

/// Degree-m polynomial smoother with error propagator W_m(I - 2G/rho)/(2m+1),
/// G = D^-1 K, W_m the fourth-kind Chebyshev polynomial. Costs m products
/// with K.
Vector chebyshev_apply(const SparseMatrix& k, const SmootherState& s, std::span<const double> f,
                       std::span<const double> x0);

/// In-place dispatch on the state's kind; for Chebyshev one sweep is one
/// full degree-m application.
void smooth(const SparseMatrix& k, const SmootherState& s, std::span<const double> f,
            std::span<double> x, int sweeps);

/// Rayleigh-quotient estimate of lambda_max(D^-1 K) after `iters` power
/// iterations from a seeded random start, times 1.1.
double estimate_lambda_max(const SparseMatrix& k, std::span<const double> d, int iters = 20,
                           std::uint64_t seed = 42);

/// Chebyshev degree used for spline degree p: 8 up to p = 3, then 12, 14, 16.
int default_chebyshev_degree(int p);

enum class CoarseMode { Pcg, L1Jacobi30 };

struct CoarseSolveConfig {
  CoarseMode mode = CoarseMode::Pcg;
  double rtol = 1e-4;
  int maxit = 30;
  int l1_sweeps = 30;
};

struct CoarseSolveResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Inexact coarsest-level solve: CG preconditioned by one weighted-Jacobi
/// sweep (omega = 4 / (3 lambda_hat)), or a fixed number of l1-Jacobi sweeps.
class CoarseSolver {
 public:
  CoarseSolver() = default;
  CoarseSolver(const SparseMatrix& k, CoarseSolveConfig cfg, std::uint64_t seed = 42);

  CoarseSolveResult solve(const SparseMatrix& k, std::span<const double> f) const;
  const CoarseSolveConfig& config() const { return cfg_; }

 private:
  CoarseSolveConfig cfg_;
  SmootherState jacobi_;
  SmootherState l1_;
};

/// Free-function form of CoarseSolver.
CoarseSolveResult coarse_solve(const SparseMatrix& k, std::span<const double> f,
                               const CoarseSolveConfig& cfg, std::uint64_t seed = 42);

}  // namespace igamg
