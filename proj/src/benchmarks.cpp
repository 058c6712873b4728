#include "igamg/benchmarks.hpp"

#include <cmath>
#include <stdexcept>

namespace igamg {

namespace {

const KnotVector& linear() {
  static const KnotVector kv(1, {0.0, 0.0, 1.0, 1.0});
  return kv;
}

/// Trilinear patch for the box [lo, hi].
Patch box_patch(const Point3& lo, const Point3& hi, int k, int p) {
  Patch patch;
  patch.geometry_knots = {linear(), linear(), linear()};
  for (int c = 0; c < 2; ++c) {
    for (int b = 0; b < 2; ++b) {
      for (int a = 0; a < 2; ++a) {
        patch.control_points.emplace_back(a ? hi.x() : lo.x(), b ? hi.y() : lo.y(),
                                          c ? hi.z() : lo.z());
        patch.weights.push_back(1.0);
      }
    }
  }
  const KnotVector sol = KnotVector::uniform(k, p);
  patch.solution_knots = {sol, sol, sol};
  return patch;
}

BoundaryCondition dirichlet(int side, ScalarField g) {
  return {side, BcKind::Dirichlet, std::move(g)};
}

BoundaryCondition neumann(int side, ScalarField g) {
  return {side, BcKind::Neumann, std::move(g)};
}

Problem cube(int k, int p) {
  Problem pr;
  pr.name = "cube";
  pr.patches.push_back(box_patch({0, 0, 0}, {1, 1, 1}, k, p));
  auto u = [](const Point3& x) { return std::exp(x.x() + x.z()) * std::sin(x.y()); };
  pr.exact = u;
  pr.source = [u](const Point3& x) { return -u(x); };
  pr.bcs = {{
      dirichlet(1, u),
      dirichlet(2, u),
      dirichlet(3, u),
      neumann(4, [](const Point3& x) { return std::exp(x.x() + x.z()) * std::cos(x.y()); }),
      neumann(5, [u](const Point3& x) { return -u(x); }),
      neumann(6, u),
  }};
  return pr;
}

// u = exp(x) sin(xy) cos(z), shared by the L-shape and the ring.
double u_mixed(const Point3& x) {
  return std::exp(x.x()) * std::sin(x.x() * x.y()) * std::cos(x.z());
}

double f_mixed(const Point3& x) {
  const double xy = x.x() * x.y();
  return std::exp(x.x()) * std::cos(x.z()) *
         (-2.0 * x.y() * std::cos(xy) + std::sin(xy) * (x.y() * x.y() + x.x() * x.x()));
}

double dudx_mixed(const Point3& x) {
  const double xy = x.x() * x.y();
  return std::exp(x.x()) * std::cos(x.z()) * (std::sin(xy) + x.y() * std::cos(xy));
}

double dudy_mixed(const Point3& x) {
  return x.x() * std::exp(x.x()) * std::cos(x.x() * x.y()) * std::cos(x.z());
}

double dudz_mixed(const Point3& x) {
  return -std::exp(x.x()) * std::sin(x.x() * x.y()) * std::sin(x.z());
}

// Three unit cubes forming an L-prism: A = [0,1]^3, B = A + e_x, C = A + e_y.
// A is glued to B across x = 1 and to C across y = 1; the two re-entrant
// faces (C at x = 1, B at y = 1) are Neumann, every other face Dirichlet.
Problem lshape(int k, int p) {
  Problem pr;
  pr.name = "lshape";
  pr.patches.push_back(box_patch({0, 0, 0}, {1, 1, 1}, k, p));
  pr.patches.push_back(box_patch({1, 0, 0}, {2, 1, 1}, k, p));
  pr.patches.push_back(box_patch({0, 1, 0}, {1, 2, 1}, k, p));
  pr.exact = u_mixed;
  pr.source = f_mixed;
  pr.bcs = {
      {dirichlet(1, u_mixed), dirichlet(3, u_mixed), dirichlet(5, u_mixed),
       dirichlet(6, u_mixed)},
      {dirichlet(2, u_mixed), dirichlet(3, u_mixed), neumann(4, dudy_mixed),
       dirichlet(5, u_mixed), dirichlet(6, u_mixed)},
      {dirichlet(1, u_mixed), neumann(2, dudx_mixed), dirichlet(4, u_mixed),
       dirichlet(5, u_mixed), dirichlet(6, u_mixed)},
  };
  return pr;
}

// Quarter of the annulus 1 <= r <= 2 in the first quadrant, height 1.
// xi_1 is radial, xi_2 angular (exact quadratic NURBS arc), xi_3 vertical.
Problem ring(int k, int p) {
  Problem pr;
  pr.name = "ring";
  Patch patch;
  patch.geometry_knots = {linear(), KnotVector(2, {0, 0, 0, 1, 1, 1}), linear()};
  const double wm = std::sqrt(0.5);
  for (int c = 0; c < 2; ++c) {
    for (int b = 0; b < 3; ++b) {
      for (int a = 0; a < 2; ++a) {
        const double r = a ? 2.0 : 1.0;
        const double x = b == 2 ? 0.0 : r;
        const double y = b == 0 ? 0.0 : r;
        patch.control_points.emplace_back(x, y, static_cast<double>(c));
        patch.weights.push_back(b == 1 ? wm : 1.0);
      }
    }
  }
  const KnotVector sol = KnotVector::uniform(k, p);
  patch.solution_knots = {sol, sol, sol};
  pr.patches.push_back(std::move(patch));
  pr.exact = u_mixed;
  pr.source = f_mixed;
  pr.bcs = {{
      dirichlet(1, u_mixed),
      dirichlet(2, u_mixed),
      dirichlet(3, u_mixed),
      neumann(4, [](const Point3& x) { return -dudx_mixed(x); }),
      neumann(5, [](const Point3& x) { return -dudz_mixed(x); }),
      neumann(6, dudz_mixed),
  }};
  return pr;
}

}  // namespace

Problem build_benchmark(const std::string& name, int k, int p) {
  if (k < 4 || k > 96) throw std::invalid_argument("k must be in 4..96, got " + std::to_string(k));
  if (p < 2 || p > 6) throw std::invalid_argument("p must be in 2..6, got " + std::to_string(p));
  if (name == "cube") return cube(k, p);
  if (name == "lshape") return lshape(k, p);
  if (name == "ring") return ring(k, p);
  throw std::invalid_argument("unknown benchmark '" + name + "' (expected cube, lshape or ring)");
}

std::vector<std::string> benchmark_names() { return {"cube", "lshape", "ring"}; }

}  // namespace igamg
