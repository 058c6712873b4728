#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "igamg/bspline.hpp"

namespace igamg {

using Point3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// One trivariate tensor-product patch. The geometry is a NURBS map given by
/// its own (coarse) knot vectors and control net; the solution space uses
/// `solution_knots`, which coincide with the geometry knots only in the
/// isoparametric case.
struct Patch {
  std::array<KnotVector, 3> geometry_knots;
  /// Lexicographic with the first parametric direction fastest.
  std::vector<Point3> control_points;
  std::vector<double> weights;
  std::array<KnotVector, 3> solution_knots;

  /// Throws std::invalid_argument if the control net does not match the
  /// knot vectors or a weight is not positive.
  void validate() const;

  std::array<int, 3> geometry_shape() const {
    return {geometry_knots[0].n_basis(), geometry_knots[1].n_basis(), geometry_knots[2].n_basis()};
  }
  std::array<int, 3> solution_shape() const {
    return {solution_knots[0].n_basis(), solution_knots[1].n_basis(), solution_knots[2].n_basis()};
  }
};

struct GeometryPoint {
  Point3 x;
  /// jacobian(a, d) = d x_a / d xi_d
  Matrix3 jacobian;
  double det = 0.0;
};

class DegenerateMapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluates x = F(xi) and its Jacobian through the NURBS quotient rule.
/// Throws DegenerateMapError if det J <= 0.
GeometryPoint geometry_map(const Patch& patch, const std::array<double, 3>& xi);

/// Same, from precomputed univariate geometry basis evaluations (one per
/// direction); used by the assembly loops. `check_det` can be disabled for
/// evaluations on faces, where only tangent vectors are needed.
GeometryPoint geometry_map(const Patch& patch, const std::array<const BasisEval*, 3>& basis,
                           bool check_det = true);

}  // namespace igamg
