#pragma once

// Coarsening by compatible weighted matching: pairwise aggregates from a
// greedy maximum-product matching, composed m times per level, with an
// optional damped-Jacobi smoothing of the composite prolongation.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "igamg/sparse.hpp"

namespace igamg {

struct AggregationConfig {
  int target_aggregate_size = 8;  ///< 2, 4 or 8 (log2 pairwise steps)
  bool smooth_prolongation = true;
  double omega = 0.0;  ///< prolongation damping; 0 selects 4 / (3 lambda_hat)
  int test_vector_sweeps = 0;
  Index coarse_size_threshold = 50;
  int max_levels = 20;
  double eligibility_threshold = 1.0;  ///< edges need c_ij above this
  int power_iterations = 20;
  std::uint64_t seed = 42;

  void validate() const;
  int matching_steps() const;
};

/// All-ones, then `sweeps` l1-Jacobi sweeps on K w = 0, scaled to unit
/// infinity norm; zero entries become +DBL_MIN.
Vector compute_test_vector(const SparseMatrix& k, int sweeps);

struct WeightedEdge {
  Index i;
  Index j;
  double c;
};

/// c_ij = 1 - 2 k_ij w_i w_j / (k_ii w_i^2 + k_jj w_j^2) for every stored
/// pair i < j; with `keep_above` only edges with c_ij above it are returned.
std::vector<WeightedEdge> edge_weights(const SparseMatrix& k, std::span<const double> w,
                                       std::optional<double> keep_above = std::nullopt);

struct Matching {
  std::vector<std::array<Index, 2>> pairs;  ///< selection order, i < j
  std::vector<Index> singletons;            ///< ascending

  Index n_aggregates() const { return static_cast<Index>(pairs.size() + singletons.size()); }
};

/// Greedy: edges with c > threshold sorted by descending c (ties by
/// ascending (i, j)), taken when both ends are still free.
Matching max_product_matching(std::span<const WeightedEdge> edges, Index n,
                              double threshold = 1.0);

/// One column per aggregate: pairs in selection order, then singletons.
SparseMatrix pairwise_prolongation(const Matching& m, std::span<const double> w, Index n);

struct LevelBuild {
  SparseMatrix p;          ///< composite, smoothed when requested
  SparseMatrix k_coarse;
  Vector w_coarse;
  double omega = 0.0;      ///< damping used (0 when unsmoothed)
  int steps = 0;           ///< pairwise steps actually applied
  bool breakdown = false;  ///< no pair could be formed at all
};

LevelBuild build_level(const SparseMatrix& k, std::span<const double> w,
                       const AggregationConfig& cfg);

struct HierarchyLevel {
  SparseMatrix k;
  SparseMatrix p;  ///< to the next level; empty on the coarsest
  double omega = 0.0;
};

struct Hierarchy {
  std::vector<HierarchyLevel> levels;
  double opc = 1.0;
  bool breakdown = false;
  AggregationConfig config;

  Index size(std::size_t level) const { return levels[level].k.rows(); }
  /// Per-level n and nnz plus the operator complexity, one line per level.
  std::string summary() const;
};

Hierarchy build_hierarchy(SparseMatrix k, const AggregationConfig& cfg);

/// sum of nnz over levels divided by nnz of the finest.
double operator_complexity(const Hierarchy& h);
double operator_complexity(std::span<const std::size_t> nnz_per_level);

}  // namespace igamg
