#pragma once

// Symmetric V-cycle over an aggregation hierarchy and the outer Krylov
// solvers (preconditioned CG and flexible CG).

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "igamg/aggregation.hpp"
#include "igamg/smoothing.hpp"
#include "igamg/sparse.hpp"

namespace igamg {

struct CycleConfig {
  SmootherKind smoother = SmootherKind::ChebyshevL1;
  int degree = 8;  ///< Chebyshev degree
  int sweeps = 1;  ///< pre- and post-smoothing applications per level
  CoarseSolveConfig coarse;
};

/// Hierarchy plus per-level smoother state and the coarsest-level solver.
class Multigrid {
 public:
  Multigrid(Hierarchy hierarchy, CycleConfig cfg);

  /// e = V(r): zero initial guess, pre-smooth, restrict with P^T, recurse,
  /// correct, post-smooth.
  void apply(std::span<const double> r, std::span<double> e) const;
  Vector apply(std::span<const double> r) const;

  const Hierarchy& hierarchy() const { return hierarchy_; }
  const CycleConfig& config() const { return cfg_; }
  const SparseMatrix& matrix() const { return hierarchy_.levels.front().k; }

 private:
  void cycle(std::size_t level, std::span<const double> r, std::span<double> e) const;

  Hierarchy hierarchy_;
  CycleConfig cfg_;
  std::vector<SmootherState> smoothers_;
  std::vector<SparseMatrix> restrictions_;
  CoarseSolver coarse_;
};

Vector vcycle_apply(const Multigrid& mg, std::span<const double> r);

enum class KrylovVariant { CG, FCG };

struct KrylovConfig {
  KrylovVariant variant = KrylovVariant::FCG;
  double rtol = 1e-6;
  int maxit = 100;
};

struct SolverReport {
  int iterations = 0;
  std::vector<double> relative_residual_history;  ///< starts at 1
  bool converged = false;
  double opc = 1.0;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
};

/// z = B r
using Preconditioner = std::function<void(std::span<const double>, std::span<double>)>;

Preconditioner identity_preconditioner();
Preconditioner multigrid_preconditioner(const Multigrid& mg);

/// Thrown when <z, r> <= 0: the preconditioner is not positive definite.
class PreconditionerBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KrylovResult {
  Vector u;
  SolverReport report;
};

/// Zero initial guess; stops when ||F - K u|| / ||F|| <= rtol (true
/// residual, recomputed every iteration) or after maxit iterations. FCG
/// keeps one previous direction for orthogonalization.
KrylovResult krylov_solve(const SparseMatrix& k, std::span<const double> f,
                          const Preconditioner& b, const KrylovConfig& cfg);

struct SolverConfig {
  AggregationConfig aggregation;
  CycleConfig cycle;
  KrylovConfig krylov;
};

struct MultigridSolve {
  KrylovResult result;
  std::vector<Index> level_sizes;
  std::vector<std::size_t> level_nnz;
  bool breakdown = false;  ///< hierarchy stopped on a matching breakdown
};

/// Hierarchy setup plus Krylov solve with timings and OPC in the report.
/// Takes K by value so callers can hand over large matrices.
MultigridSolve solve_with_multigrid(SparseMatrix k, std::span<const double> f,
                                    const SolverConfig& cfg);

class NotSymmetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Reads K (and optionally F) from Matrix Market files and solves. Without
/// an RHS file F = K 1. Rejects matrices that are not symmetric to 1e-12
/// relative.
MultigridSolve solve_external(const std::string& matrix_path,
                             const std::optional<std::string>& rhs_path, const SolverConfig& cfg);

}  // namespace igamg
