#include "igamg/geometry.hpp"

#include <sstream>
#include <stdexcept>

#include <Eigen/LU>

namespace igamg {

void Patch::validate() const {
  const auto shape = geometry_shape();
  const std::size_t n = static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
  if (control_points.size() != n || weights.size() != n) {
    throw std::invalid_argument("Patch: control net size does not match geometry knot vectors");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("Patch: weights must be positive");
  }
  for (int d = 0; d < 3; ++d) {
    if (solution_knots[d].front() != geometry_knots[d].front() ||
        solution_knots[d].back() != geometry_knots[d].back()) {
      throw std::invalid_argument("Patch: solution and geometry parameter ranges differ");
    }
  }
}

GeometryPoint geometry_map(const Patch& patch, const std::array<const BasisEval*, 3>& basis,
                           bool check_det) {
  const auto shape = patch.geometry_shape();
  double w_sum = 0.0;
  Eigen::Vector3d dw = Eigen::Vector3d::Zero();
  Point3 wx = Point3::Zero();
  Matrix3 dwx = Matrix3::Zero();
  const BasisEval& b0 = *basis[0];
  const BasisEval& b1 = *basis[1];
  const BasisEval& b2 = *basis[2];
  for (std::size_t c = 0; c < b2.values.size(); ++c) {
    const int i2 = b2.first + static_cast<int>(c);
    for (std::size_t b = 0; b < b1.values.size(); ++b) {
      const int i1 = b1.first + static_cast<int>(b);
      for (std::size_t a = 0; a < b0.values.size(); ++a) {
        const int i0 = b0.first + static_cast<int>(a);
        const std::size_t idx =
            static_cast<std::size_t>(i0) + static_cast<std::size_t>(shape[0]) * (i1 + shape[1] * i2);
        const double w = patch.weights[idx];
        const double n = b0.values[a] * b1.values[b] * b2.values[c];
        const Eigen::Vector3d dn(b0.derivs[a] * b1.values[b] * b2.values[c],
                                 b0.values[a] * b1.derivs[b] * b2.values[c],
                                 b0.values[a] * b1.values[b] * b2.derivs[c]);
        const Point3& p = patch.control_points[idx];
        w_sum += w * n;
        dw += w * dn;
        wx += (w * n) * p;
        dwx += (w * p) * dn.transpose();
      }
    }
  }
  GeometryPoint out;
  out.x = wx / w_sum;
  out.jacobian = (dwx - out.x * dw.transpose()) / w_sum;
  out.det = out.jacobian.determinant();
  if (check_det && !(out.det > 0.0)) {
    std::ostringstream msg;
    msg << "geometry map is degenerate (det J = " << out.det << ") at x = ("
        << out.x.transpose() << ")";
    throw DegenerateMapError(msg.str());
  }
  return out;
}

GeometryPoint geometry_map(const Patch& patch, const std::array<double, 3>& xi) {
  const BasisEval e0 = bspline_eval(patch.geometry_knots[0], xi[0]);
  const BasisEval e1 = bspline_eval(patch.geometry_knots[1], xi[1]);
  const BasisEval e2 = bspline_eval(patch.geometry_knots[2], xi[2]);
  return geometry_map(patch, {&e0, &e1, &e2});
}

}  // namespace igamg
