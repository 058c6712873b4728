#pragma once

// Benchmark driver: configuration, single runs with a JSON report, CSV
// sweeps over (k, p) grids, and Matrix Market export.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "igamg/assembly.hpp"
#include "igamg/solver.hpp"

namespace igamg {

struct RunConfig {
  std::string problem = "cube";  ///< cube, lshape, ring or external
  int k = 12;
  int p = 3;
  int aggregate_size = 8;
  bool smooth_prolongation = true;
  std::string smoother = "cheb";  ///< cheb or l1jacobi
  int cheb_degree = 0;            ///< 0: chosen from p (8 for external)
  int sweeps = 1;
  std::string coarse = "pcg";  ///< pcg or l1jac30
  std::string krylov = "fcg";  ///< fcg or cg
  double rtol = 1e-6;
  int maxit = 100;
  std::uint64_t seed = 42;
  std::string matrix_path;  ///< external mode
  std::string rhs_path;     ///< external mode, optional
  bool compute_error = false;
  double memory_limit_gb = 4.0;  ///< refuse cells whose estimated footprint exceeds this

  void validate() const;
  int effective_cheb_degree() const;
  SolverConfig solver_config() const;
};

struct BenchReport {
  RunConfig config;
  Index n_free = 0;
  std::size_t nnz = 0;
  std::vector<Index> level_sizes;
  std::vector<std::size_t> level_nnz;
  double opc = 1.0;
  int iterations = 0;
  bool converged = false;
  bool matching_breakdown = false;
  std::vector<double> residual_history;
  double assembly_seconds = 0.0;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  std::optional<double> l2_error;
  std::optional<double> linf_error;
};

class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimated number of stored entries of the assembled K, from the DoF
/// map alone.
std::size_t estimate_nnz(const Problem& problem, const DofMap& dofs);

/// Assembles (or reads), builds the hierarchy and solves.
BenchReport run_benchmark(const RunConfig& cfg);

/// Top-level JSON field names, in output order.
const std::vector<std::string>& report_fields();
std::string report_to_json(const BenchReport& report, int indent = 2);

/// CSV header and one row per (k, p) with k varying slowest. Cells whose
/// run throws are written with "ERR" in every result column.
void sweep(const RunConfig& base, std::span<const int> ks, std::span<const int> ps,
           std::ostream& out);
std::string sweep_csv(const RunConfig& base, std::span<const int> ks, std::span<const int> ps);

/// Writes PREFIX.mtx (K) and PREFIX_rhs.mtx (F) for a benchmark system.
void export_system(const AssembledSystem& system, const std::string& prefix);

}  // namespace igamg
