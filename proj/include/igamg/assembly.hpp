#pragma once

// Galerkin assembly of the Poisson problem on conforming multipatch
// tensor-product spline discretizations.
//
// The solution basis on each patch is the B-spline basis over
// `Patch::solution_knots`; the geometry enters only through F and J_F.
// With unit weights and equal knot vectors this is the isoparametric
// setting, otherwise the non-isoparametric one.

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "igamg/geometry.hpp"
#include "igamg/sparse.hpp"

namespace igamg {

using ScalarField = std::function<double(const Point3&)>;

enum class BcKind { Dirichlet, Neumann };

/// Side numbering: 1: xi_1 = 0, 2: xi_1 = 1, 3: xi_2 = 0, 4: xi_2 = 1,
/// 5: xi_3 = 0, 6: xi_3 = 1.
struct BoundaryCondition {
  int side = 1;
  BcKind kind = BcKind::Dirichlet;
  ScalarField datum;  ///< g_D or g_N (outward normal derivative)
};

struct Problem {
  std::string name;
  std::vector<Patch> patches;
  /// One list per patch, covering exactly its external sides.
  std::vector<std::vector<BoundaryCondition>> bcs;
  ScalarField source;
  ScalarField exact;  ///< may be empty when no closed form is known
};

class NonconformingInterfaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Local-to-global numbering and the free/Dirichlet split.
struct DofMap {
  /// patch_to_global[patch][local] with local = i0 + n0 * (i1 + n1 * i2).
  std::vector<std::vector<Index>> patch_to_global;
  Index n_total = 0;
  Index n_free = 0;
  Index n_dirichlet = 0;
  std::vector<Index> free_index;       ///< global -> free row, or -1
  std::vector<Index> dirichlet_index;  ///< global -> Dirichlet slot, or -1
  /// (patch, side) pairs glued to another patch.
  std::vector<std::array<int, 2>> interface_sides;
};

/// Identifies interface DoFs (faces whose corners coincide to 1e-10 are
/// glued; their DoFs are matched through Greville-point images) and marks
/// every DoF on a Dirichlet face. Validates that external sides carry one
/// condition each and interface sides none.
DofMap build_dof_map(const Problem& problem);

struct AssembledSystem {
  SparseMatrix K;  ///< free-free block
  Vector F;        ///< load with Dirichlet lifting subtracted
  DofMap dofs;
  Vector dirichlet_values;
  Index n_total = 0;
  Index n_free = 0;
};

/// Element loop over knot spans with (p+1) Gauss points per direction.
/// Dirichlet data is L2-projected onto each Dirichlet face's trace space
/// (shared DoFs averaged) and eliminated.
AssembledSystem assemble_system(const Problem& problem);

/// Global coefficient vector (free + Dirichlet) from the free unknowns.
Vector expand_solution(const AssembledSystem& system, std::span<const double> u_free);

struct SolutionError {
  double linf = 0.0;  ///< max over a (2k+1)^3 parametric sample grid per patch
  double l2 = 0.0;    ///< Gauss quadrature with p+2 points per direction
};

SolutionError solution_error(const Problem& problem, const AssembledSystem& system,
                             std::span<const double> u_free);

/// Stiffness matrix of -u'' on [0,1] discretized with the B-splines of `kv`,
/// optionally dropping the first/last basis function (homogeneous Dirichlet).
SparseMatrix assemble_stiffness_1d(const KnotVector& kv, bool drop_first, bool drop_last);

}  // namespace igamg
