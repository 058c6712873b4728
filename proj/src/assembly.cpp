#include "igamg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace igamg {

namespace {

constexpr double kCoincidenceTol = 1e-10;

struct Face {
  int dir;
  bool at_end;
  int t0;  ///< first tangential direction
  int t1;  ///< second tangential direction
};

Face face_of(int side) {
  if (side < 1 || side > 6) {
    throw std::invalid_argument("side " + std::to_string(side) + " is not in 1..6");
  }
  const int d = (side - 1) / 2;
  return {d, side % 2 == 0, d == 0 ? 1 : 0, d == 2 ? 1 : 2};
}

std::size_t lex(const std::array<int, 3>& n, int i0, int i1, int i2) {
  return static_cast<std::size_t>(i0) +
         static_cast<std::size_t>(n[0]) * (static_cast<std::size_t>(i1) +
                                           static_cast<std::size_t>(n[1]) * i2);
}

std::size_t lex(const std::array<int, 3>& n, const std::array<int, 3>& i) {
  return lex(n, i[0], i[1], i[2]);
}

/// Patch-local indices of the solution DoFs on a face, first tangential
/// direction fastest.
std::vector<std::size_t> face_dofs(const Patch& patch, int side) {
  const auto n = patch.solution_shape();
  const Face f = face_of(side);
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(n[f.t0]) * n[f.t1]);
  std::array<int, 3> idx{};
  idx[f.dir] = f.at_end ? n[f.dir] - 1 : 0;
  for (int j1 = 0; j1 < n[f.t1]; ++j1) {
    for (int j0 = 0; j0 < n[f.t0]; ++j0) {
      idx[f.t0] = j0;
      idx[f.t1] = j1;
      out.push_back(lex(n, idx));
    }
  }
  return out;
}

Point3 map_point(const Patch& patch, const std::array<double, 3>& xi) {
  const BasisEval e0 = bspline_eval(patch.geometry_knots[0], xi[0]);
  const BasisEval e1 = bspline_eval(patch.geometry_knots[1], xi[1]);
  const BasisEval e2 = bspline_eval(patch.geometry_knots[2], xi[2]);
  return geometry_map(patch, {&e0, &e1, &e2}, false).x;
}

std::array<Point3, 4> face_corners(const Patch& patch, int side) {
  const Face f = face_of(side);
  std::array<Point3, 4> out;
  int c = 0;
  for (int b : {0, 1}) {
    for (int a : {0, 1}) {
      std::array<double, 3> xi{};
      xi[f.dir] = f.at_end ? patch.geometry_knots[f.dir].back() : patch.geometry_knots[f.dir].front();
      xi[f.t0] = a ? patch.geometry_knots[f.t0].back() : patch.geometry_knots[f.t0].front();
      xi[f.t1] = b ? patch.geometry_knots[f.t1].back() : patch.geometry_knots[f.t1].front();
      out[c++] = map_point(patch, xi);
    }
  }
  return out;
}

bool same_point_set(std::span<const Point3> a, std::span<const Point3> b) {
  if (a.size() != b.size()) return false;
  for (const auto& p : a) {
    const bool found = std::any_of(b.begin(), b.end(), [&](const Point3& q) {
      return (p - q).cwiseAbs().maxCoeff() <= kCoincidenceTol;
    });
    if (!found) return false;
  }
  return true;
}

/// Physical images of the Greville points of the DoFs on a face.
std::vector<Point3> face_dof_points(const Patch& patch, int side) {
  const auto n = patch.solution_shape();
  const Face f = face_of(side);
  std::vector<Point3> out;
  out.reserve(static_cast<std::size_t>(n[f.t0]) * n[f.t1]);
  std::array<double, 3> xi{};
  xi[f.dir] = f.at_end ? patch.solution_knots[f.dir].back() : patch.solution_knots[f.dir].front();
  for (int j1 = 0; j1 < n[f.t1]; ++j1) {
    for (int j0 = 0; j0 < n[f.t0]; ++j0) {
      xi[f.t0] = patch.solution_knots[f.t0].greville(j0);
      xi[f.t1] = patch.solution_knots[f.t1].greville(j1);
      out.push_back(map_point(patch, xi));
    }
  }
  return out;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

/// Univariate quadrature data along one parametric direction: per element
/// and point, the weight (scaled by the span length) and the solution and
/// geometry basis evaluations.
struct AxisTable {
  int n_elems = 0;
  int q = 0;
  std::vector<double> weight;
  std::vector<BasisEval> sol;
  std::vector<BasisEval> geo;

  std::size_t at(int e, int i) const { return static_cast<std::size_t>(e) * q + i; }
};

AxisTable volume_axis(const KnotVector& sol, const KnotVector& geo, int q) {
  const auto bp = sol.breakpoints();
  for (double g : geo.breakpoints()) {
    if (!std::binary_search(bp.begin(), bp.end(), g)) {
      throw std::invalid_argument("geometry breakpoint " + std::to_string(g) +
                                  " is not a breakpoint of the solution space");
    }
  }
  const QuadratureRule rule = gauss_rule(q);
  AxisTable t;
  t.n_elems = static_cast<int>(bp.size()) - 1;
  t.q = q;
  for (int e = 0; e < t.n_elems; ++e) {
    const double h = bp[e + 1] - bp[e];
    for (int i = 0; i < q; ++i) {
      const double xi = bp[e] + h * rule.nodes[i];
      t.weight.push_back(h * rule.weights[i]);
      t.sol.push_back(bspline_eval(sol, xi));
      t.geo.push_back(bspline_eval(geo, xi));
    }
  }
  return t;
}

/// Degenerate axis for the normal direction of a face: only the boundary
/// basis function (index 0 or n-1) is kept.
AxisTable face_normal_axis(const KnotVector& sol, const KnotVector& geo, bool at_end) {
  const double xi = at_end ? sol.back() : sol.front();
  AxisTable t;
  t.n_elems = 1;
  t.q = 1;
  t.weight = {1.0};
  BasisEval s;
  s.first = at_end ? sol.n_basis() - 1 : 0;
  s.values = {1.0};
  s.derivs = {0.0};
  t.sol.push_back(std::move(s));
  t.geo.push_back(bspline_eval(geo, xi));
  return t;
}

std::array<AxisTable, 3> volume_tables(const Patch& patch, int extra_points) {
  std::array<AxisTable, 3> t;
  for (int d = 0; d < 3; ++d) {
    t[d] = volume_axis(patch.solution_knots[d], patch.geometry_knots[d],
                       patch.solution_knots[d].degree() + 1 + extra_points);
  }
  return t;
}

struct FacePointData {
  std::span<const std::size_t> local;  ///< patch-local DoF indices
  std::span<const int> face_local;     ///< indices into face_dofs() order
  std::span<const double> phi;
  Point3 x;
  double weight;  ///< quadrature weight times surface measure
};

/// Visits every quadrature point of a face ((p+1)^2 per face element).
template <typename Fn>
void for_each_face_point(const Patch& patch, int side, Fn&& fn) {
  const Face f = face_of(side);
  const auto n = patch.solution_shape();
  std::array<AxisTable, 3> t;
  for (int d = 0; d < 3; ++d) {
    if (d == f.dir) {
      t[d] = face_normal_axis(patch.solution_knots[d], patch.geometry_knots[d], f.at_end);
    } else {
      t[d] = volume_axis(patch.solution_knots[d], patch.geometry_knots[d],
                         patch.solution_knots[d].degree() + 1);
    }
  }
  const int nb0 = patch.solution_knots[f.t0].degree() + 1;
  const int nb1 = patch.solution_knots[f.t1].degree() + 1;
  std::vector<std::size_t> local(static_cast<std::size_t>(nb0) * nb1);
  std::vector<int> face_local(local.size());
  std::vector<double> phi(local.size());
  const AxisTable& ta = t[f.t0];
  const AxisTable& tb = t[f.t1];
  for (int eb = 0; eb < tb.n_elems; ++eb) {
    for (int ea = 0; ea < ta.n_elems; ++ea) {
      const int first_a = ta.sol[ta.at(ea, 0)].first;
      const int first_b = tb.sol[tb.at(eb, 0)].first;
      std::array<int, 3> idx{};
      idx[f.dir] = t[f.dir].sol[0].first;
      for (int b = 0; b < nb1; ++b) {
        for (int a = 0; a < nb0; ++a) {
          idx[f.t0] = first_a + a;
          idx[f.t1] = first_b + b;
          local[a + nb0 * b] = lex(n, idx);
          face_local[a + nb0 * b] = idx[f.t0] + n[f.t0] * idx[f.t1];
        }
      }
      for (int ib = 0; ib < tb.q; ++ib) {
        for (int ia = 0; ia < ta.q; ++ia) {
          std::array<const BasisEval*, 3> geo{};
          geo[f.dir] = &t[f.dir].geo[0];
          geo[f.t0] = &ta.geo[ta.at(ea, ia)];
          geo[f.t1] = &tb.geo[tb.at(eb, ib)];
          const GeometryPoint gp = geometry_map(patch, geo, false);
          const double ds = gp.jacobian.col(f.t0).cross(gp.jacobian.col(f.t1)).norm();
          const BasisEval& sa = ta.sol[ta.at(ea, ia)];
          const BasisEval& sb = tb.sol[tb.at(eb, ib)];
          for (int b = 0; b < nb1; ++b) {
            for (int a = 0; a < nb0; ++a) phi[a + nb0 * b] = sa.values[a] * sb.values[b];
          }
          fn(FacePointData{local, face_local, phi, gp.x,
                           ta.weight[ta.at(ea, ia)] * tb.weight[tb.at(eb, ib)] * ds});
        }
      }
    }
  }
}

/// L2 projection of g onto the trace space of one face; results are
/// accumulated into (sum, count) per Dirichlet slot.
void project_dirichlet_face(const Patch& patch, std::span<const Index> l2g, int side,
                            const ScalarField& g, const DofMap& dofs, Vector& sum,
                            std::vector<int>& count) {
  const Face f = face_of(side);
  const auto n = patch.solution_shape();
  const int nf = n[f.t0] * n[f.t1];
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
  for_each_face_point(patch, side, [&](const FacePointData& pt) {
    const double gv = g ? g(pt.x) : 0.0;
    for (std::size_t a = 0; a < pt.phi.size(); ++a) {
      rhs[pt.face_local[a]] += pt.weight * gv * pt.phi[a];
      for (std::size_t b = 0; b < pt.phi.size(); ++b) {
        triplets.emplace_back(pt.face_local[a], pt.face_local[b],
                              pt.weight * pt.phi[a] * pt.phi[b]);
      }
    }
  });
  Eigen::SparseMatrix<double> mass(nf, nf);
  mass.setFromTriplets(triplets.begin(), triplets.end());
  triplets.clear();
  triplets.shrink_to_fit();
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(mass);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("boundary mass matrix factorization failed on side " +
                             std::to_string(side));
  }
  const Eigen::VectorXd values = llt.solve(rhs);
  const auto local = face_dofs(patch, side);
  for (int i = 0; i < nf; ++i) {
    const Index slot = dofs.dirichlet_index[l2g[local[i]]];
    sum[slot] += values[i];
    ++count[slot];
  }
}

}  // namespace

DofMap build_dof_map(const Problem& problem) {
  const auto& patches = problem.patches;
  if (patches.empty()) throw std::invalid_argument("problem has no patches");
  if (problem.bcs.size() != patches.size()) {
    throw std::invalid_argument("boundary condition lists must match the patch count");
  }
  std::vector<std::size_t> offset(patches.size() + 1, 0);
  for (std::size_t p = 0; p < patches.size(); ++p) {
    patches[p].validate();
    const auto n = patches[p].solution_shape();
    offset[p + 1] = offset[p] + static_cast<std::size_t>(n[0]) * n[1] * n[2];
  }

  DofMap map;
  UnionFind uf(offset.back());
  std::vector<std::array<bool, 6>> glued(patches.size(), std::array<bool, 6>{});
  for (std::size_t pa = 0; pa < patches.size(); ++pa) {
    for (int sa = 1; sa <= 6; ++sa) {
      const auto corners_a = face_corners(patches[pa], sa);
      for (std::size_t pb = pa + 1; pb < patches.size(); ++pb) {
        for (int sb = 1; sb <= 6; ++sb) {
          const auto corners_b = face_corners(patches[pb], sb);
          if (!same_point_set(corners_a, corners_b)) continue;
          const std::string where = "patch " + std::to_string(pa) + " side " + std::to_string(sa) +
                                    " / patch " + std::to_string(pb) + " side " +
                                    std::to_string(sb);
          if (glued[pa][sa - 1] || glued[pb][sb - 1]) {
            throw NonconformingInterfaceError("face glued to more than one patch at " + where);
          }
          const auto da = face_dofs(patches[pa], sa);
          const auto db = face_dofs(patches[pb], sb);
          if (da.size() != db.size()) {
            throw NonconformingInterfaceError("interface DoF counts differ at " + where);
          }
          const auto xa = face_dof_points(patches[pa], sa);
          const auto xb = face_dof_points(patches[pb], sb);
          std::vector<bool> used(db.size(), false);
          for (std::size_t i = 0; i < da.size(); ++i) {
            std::size_t match = db.size();
            for (std::size_t j = 0; j < db.size(); ++j) {
              if (!used[j] && (xa[i] - xb[j]).cwiseAbs().maxCoeff() <= kCoincidenceTol) {
                match = j;
                break;
              }
            }
            if (match == db.size()) {
              throw NonconformingInterfaceError("interface DoFs do not coincide at " + where);
            }
            used[match] = true;
            uf.unite(offset[pa] + da[i], offset[pb] + db[match]);
          }
          glued[pa][sa - 1] = glued[pb][sb - 1] = true;
          map.interface_sides.push_back({static_cast<int>(pa), sa});
          map.interface_sides.push_back({static_cast<int>(pb), sb});
        }
      }
    }
  }

  std::vector<Index> root_to_global(offset.back(), -1);
  map.patch_to_global.resize(patches.size());
  for (std::size_t p = 0; p < patches.size(); ++p) {
    auto& l2g = map.patch_to_global[p];
    l2g.resize(offset[p + 1] - offset[p]);
    for (std::size_t l = 0; l < l2g.size(); ++l) {
      const std::size_t root = uf.find(offset[p] + l);
      if (root_to_global[root] < 0) root_to_global[root] = map.n_total++;
      l2g[l] = root_to_global[root];
    }
  }

  std::vector<bool> dirichlet(map.n_total, false);
  for (std::size_t p = 0; p < patches.size(); ++p) {
    std::array<int, 6> conditions{};
    for (const auto& bc : problem.bcs[p]) {
      face_of(bc.side);
      if (glued[p][bc.side - 1]) {
        throw std::invalid_argument("patch " + std::to_string(p) + " side " +
                                    std::to_string(bc.side) +
                                    " is an interface and cannot carry a boundary condition");
      }
      ++conditions[bc.side - 1];
      if (bc.kind == BcKind::Dirichlet) {
        for (std::size_t l : face_dofs(patches[p], bc.side)) {
          dirichlet[map.patch_to_global[p][l]] = true;
        }
      }
    }
    for (int s = 0; s < 6; ++s) {
      if (!glued[p][s] && conditions[s] != 1) {
        throw std::invalid_argument("patch " + std::to_string(p) + " side " +
                                    std::to_string(s + 1) + " has " +
                                    std::to_string(conditions[s]) +
                                    " boundary conditions (expected exactly one)");
      }
    }
  }

  map.free_index.assign(map.n_total, -1);
  map.dirichlet_index.assign(map.n_total, -1);
  for (Index g = 0; g < map.n_total; ++g) {
    if (dirichlet[g]) {
      map.dirichlet_index[g] = map.n_dirichlet++;
    } else {
      map.free_index[g] = map.n_free++;
    }
  }
  return map;
}

AssembledSystem assemble_system(const Problem& problem) {
  AssembledSystem sys;
  sys.dofs = build_dof_map(problem);
  const DofMap& dofs = sys.dofs;
  sys.n_total = dofs.n_total;
  sys.n_free = dofs.n_free;

  {
    Vector sum(dofs.n_dirichlet, 0.0);
    std::vector<int> count(dofs.n_dirichlet, 0);
    for (std::size_t p = 0; p < problem.patches.size(); ++p) {
      for (const auto& bc : problem.bcs[p]) {
        if (bc.kind != BcKind::Dirichlet) continue;
        project_dirichlet_face(problem.patches[p], dofs.patch_to_global[p], bc.side, bc.datum,
                               dofs, sum, count);
      }
    }
    sys.dirichlet_values.resize(dofs.n_dirichlet);
    for (Index d = 0; d < dofs.n_dirichlet; ++d) sys.dirichlet_values[d] = sum[d] / count[d];
  }

  std::vector<std::vector<Index>> pattern(dofs.n_free);
  for (std::size_t p = 0; p < problem.patches.size(); ++p) {
    const Patch& patch = problem.patches[p];
    const auto n = patch.solution_shape();
    const auto& l2g = dofs.patch_to_global[p];
    std::array<std::vector<std::vector<int>>, 3> nbr;
    for (int d = 0; d < 3; ++d) nbr[d] = patch.solution_knots[d].support_neighbors();
    for (int i2 = 0; i2 < n[2]; ++i2) {
      for (int i1 = 0; i1 < n[1]; ++i1) {
        for (int i0 = 0; i0 < n[0]; ++i0) {
          const Index row = dofs.free_index[l2g[lex(n, i0, i1, i2)]];
          if (row < 0) continue;
          auto& cols = pattern[row];
          cols.reserve(cols.size() + nbr[0][i0].size() * nbr[1][i1].size() * nbr[2][i2].size());
          for (int j2 : nbr[2][i2]) {
            for (int j1 : nbr[1][i1]) {
              for (int j0 : nbr[0][i0]) {
                const Index col = dofs.free_index[l2g[lex(n, j0, j1, j2)]];
                if (col >= 0) cols.push_back(col);
              }
            }
          }
        }
      }
    }
  }
  SparseMatrixBuilder builder(dofs.n_free, dofs.n_free, std::move(pattern));
  sys.F.assign(dofs.n_free, 0.0);
  const Vector& ud = sys.dirichlet_values;

  for (std::size_t p = 0; p < problem.patches.size(); ++p) {
    const Patch& patch = problem.patches[p];
    const auto n = patch.solution_shape();
    const auto& l2g = dofs.patch_to_global[p];
    const auto t = volume_tables(patch, 0);
    const std::array<int, 3> nbd{static_cast<int>(t[0].sol[0].values.size()),
                                 static_cast<int>(t[1].sol[0].values.size()),
                                 static_cast<int>(t[2].sol[0].values.size())};
    const int nb = nbd[0] * nbd[1] * nbd[2];
    const int nq = t[0].q * t[1].q * t[2].q;

    Eigen::MatrixXd bt(nb, 3 * nq);
    Eigen::MatrixXd ke(nb, nb);
    Vector fe(nb);
    std::vector<Index> free_of(nb), dir_of(nb);

    for (int e2 = 0; e2 < t[2].n_elems; ++e2) {
      for (int e1 = 0; e1 < t[1].n_elems; ++e1) {
        for (int e0 = 0; e0 < t[0].n_elems; ++e0) {
          const int f0 = t[0].sol[t[0].at(e0, 0)].first;
          const int f1 = t[1].sol[t[1].at(e1, 0)].first;
          const int f2 = t[2].sol[t[2].at(e2, 0)].first;
          for (int a2 = 0, a = 0; a2 < nbd[2]; ++a2) {
            for (int a1 = 0; a1 < nbd[1]; ++a1) {
              for (int a0 = 0; a0 < nbd[0]; ++a0, ++a) {
                const Index g = l2g[lex(n, f0 + a0, f1 + a1, f2 + a2)];
                free_of[a] = dofs.free_index[g];
                dir_of[a] = dofs.dirichlet_index[g];
              }
            }
          }
          std::fill(fe.begin(), fe.end(), 0.0);
          int col = 0;
          for (int i2 = 0; i2 < t[2].q; ++i2) {
            for (int i1 = 0; i1 < t[1].q; ++i1) {
              for (int i0 = 0; i0 < t[0].q; ++i0, col += 3) {
                const std::size_t q0 = t[0].at(e0, i0);
                const std::size_t q1 = t[1].at(e1, i1);
                const std::size_t q2 = t[2].at(e2, i2);
                const GeometryPoint gp =
                    geometry_map(patch, {&t[0].geo[q0], &t[1].geo[q1], &t[2].geo[q2]});
                const double wdet = t[0].weight[q0] * t[1].weight[q1] * t[2].weight[q2] * gp.det;
                const Matrix3 jit = gp.jacobian.inverse().transpose();
                const double fval = problem.source ? problem.source(gp.x) : 0.0;
                const double sq = std::sqrt(wdet);
                const BasisEval& s0 = t[0].sol[q0];
                const BasisEval& s1 = t[1].sol[q1];
                const BasisEval& s2 = t[2].sol[q2];
                for (int a2 = 0, a = 0; a2 < nbd[2]; ++a2) {
                  for (int a1 = 0; a1 < nbd[1]; ++a1) {
                    const double v12 = s1.values[a1] * s2.values[a2];
                    const double d1v2 = s1.derivs[a1] * s2.values[a2];
                    const double v1d2 = s1.values[a1] * s2.derivs[a2];
                    for (int a0 = 0; a0 < nbd[0]; ++a0, ++a) {
                      const Eigen::Vector3d gref(s0.derivs[a0] * v12, s0.values[a0] * d1v2,
                                                 s0.values[a0] * v1d2);
                      bt.block<1, 3>(a, col) = (sq * (jit * gref)).transpose();
                      fe[a] += wdet * fval * s0.values[a0] * v12;
                    }
                  }
                }
              }
            }
          }
          ke.setZero();
          ke.selfadjointView<Eigen::Lower>().rankUpdate(bt);
          for (int a = 0; a < nb; ++a) {
            const Index row = free_of[a];
            if (row < 0) continue;
            sys.F[row] += fe[a];
            std::size_t hint = 0;
            for (int b = 0; b < nb; ++b) {
              const double v = a >= b ? ke(a, b) : ke(b, a);
              if (free_of[b] >= 0) {
                hint = builder.add(row, free_of[b], v, hint);
              } else {
                sys.F[row] -= v * ud[dir_of[b]];
              }
            }
          }
        }
      }
    }

    for (const auto& bc : problem.bcs[p]) {
      if (bc.kind != BcKind::Neumann) continue;
      for_each_face_point(patch, bc.side, [&](const FacePointData& pt) {
        const double gv = bc.datum ? bc.datum(pt.x) : 0.0;
        for (std::size_t a = 0; a < pt.phi.size(); ++a) {
          const Index row = dofs.free_index[l2g[pt.local[a]]];
          if (row >= 0) sys.F[row] += pt.weight * gv * pt.phi[a];
        }
      });
    }
  }
  sys.K = std::move(builder).build(true);
  require_finite(sys.F, "assembled load vector");
  return sys;
}

Vector expand_solution(const AssembledSystem& system, std::span<const double> u_free) {
  if (u_free.size() != static_cast<std::size_t>(system.n_free)) {
    throw DimensionError("expand_solution: expected " + std::to_string(system.n_free) +
                         " free values, got " + std::to_string(u_free.size()));
  }
  Vector u(system.n_total);
  for (Index g = 0; g < system.n_total; ++g) {
    const Index f = system.dofs.free_index[g];
    u[g] = f >= 0 ? u_free[f] : system.dirichlet_values[system.dofs.dirichlet_index[g]];
  }
  return u;
}

SolutionError solution_error(const Problem& problem, const AssembledSystem& system,
                             std::span<const double> u_free) {
  if (!problem.exact) throw std::invalid_argument("problem has no exact solution");
  const Vector u = expand_solution(system, u_free);
  SolutionError err;
  double l2sq = 0.0;
  for (std::size_t p = 0; p < problem.patches.size(); ++p) {
    const Patch& patch = problem.patches[p];
    const auto n = patch.solution_shape();
    const auto& l2g = system.dofs.patch_to_global[p];

    auto eval_uh = [&](const BasisEval& s0, const BasisEval& s1, const BasisEval& s2) {
      double uh = 0.0;
      for (std::size_t a2 = 0; a2 < s2.values.size(); ++a2) {
        for (std::size_t a1 = 0; a1 < s1.values.size(); ++a1) {
          for (std::size_t a0 = 0; a0 < s0.values.size(); ++a0) {
            const Index g = l2g[lex(n, s0.first + static_cast<int>(a0),
                                    s1.first + static_cast<int>(a1),
                                    s2.first + static_cast<int>(a2))];
            uh += u[g] * s0.values[a0] * s1.values[a1] * s2.values[a2];
          }
        }
      }
      return uh;
    };

    const auto t = volume_tables(patch, 1);
    for (int e2 = 0; e2 < t[2].n_elems; ++e2) {
      for (int e1 = 0; e1 < t[1].n_elems; ++e1) {
        for (int e0 = 0; e0 < t[0].n_elems; ++e0) {
          for (int i2 = 0; i2 < t[2].q; ++i2) {
            for (int i1 = 0; i1 < t[1].q; ++i1) {
              for (int i0 = 0; i0 < t[0].q; ++i0) {
                const std::size_t q0 = t[0].at(e0, i0);
                const std::size_t q1 = t[1].at(e1, i1);
                const std::size_t q2 = t[2].at(e2, i2);
                const GeometryPoint gp =
                    geometry_map(patch, {&t[0].geo[q0], &t[1].geo[q1], &t[2].geo[q2]});
                const double diff =
                    eval_uh(t[0].sol[q0], t[1].sol[q1], t[2].sol[q2]) - problem.exact(gp.x);
                l2sq += t[0].weight[q0] * t[1].weight[q1] * t[2].weight[q2] * gp.det * diff * diff;
              }
            }
          }
        }
      }
    }

    // Sample grid: breakpoints and span midpoints in every direction.
    std::array<std::vector<BasisEval>, 3> sol_samples, geo_samples;
    for (int d = 0; d < 3; ++d) {
      const auto bp = patch.solution_knots[d].breakpoints();
      std::vector<double> xs;
      for (std::size_t e = 0; e + 1 < bp.size(); ++e) {
        xs.push_back(bp[e]);
        xs.push_back(0.5 * (bp[e] + bp[e + 1]));
      }
      xs.push_back(bp.back());
      for (double x : xs) {
        sol_samples[d].push_back(bspline_eval(patch.solution_knots[d], x));
        geo_samples[d].push_back(bspline_eval(patch.geometry_knots[d], x));
      }
    }
    for (std::size_t k2 = 0; k2 < sol_samples[2].size(); ++k2) {
      for (std::size_t k1 = 0; k1 < sol_samples[1].size(); ++k1) {
        for (std::size_t k0 = 0; k0 < sol_samples[0].size(); ++k0) {
          const GeometryPoint gp = geometry_map(
              patch, {&geo_samples[0][k0], &geo_samples[1][k1], &geo_samples[2][k2]}, false);
          const double uh = eval_uh(sol_samples[0][k0], sol_samples[1][k1], sol_samples[2][k2]);
          err.linf = std::max(err.linf, std::abs(uh - problem.exact(gp.x)));
        }
      }
    }
  }
  err.l2 = std::sqrt(l2sq);
  return err;
}

SparseMatrix assemble_stiffness_1d(const KnotVector& kv, bool drop_first, bool drop_last) {
  const int n = kv.n_basis();
  std::vector<Index> map(n);
  Index next = 0;
  for (int i = 0; i < n; ++i) {
    const bool dropped = (drop_first && i == 0) || (drop_last && i == n - 1);
    map[i] = dropped ? -1 : next++;
  }
  const auto bp = kv.breakpoints();
  const QuadratureRule rule = gauss_rule(kv.degree() + 1);
  std::vector<Triplet> triplets;
  for (std::size_t e = 0; e + 1 < bp.size(); ++e) {
    const double h = bp[e + 1] - bp[e];
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const BasisEval s = bspline_eval(kv, bp[e] + h * rule.nodes[q]);
      for (std::size_t a = 0; a < s.values.size(); ++a) {
        const Index r = map[s.first + static_cast<int>(a)];
        if (r < 0) continue;
        for (std::size_t b = 0; b < s.values.size(); ++b) {
          const Index c = map[s.first + static_cast<int>(b)];
          if (c < 0) continue;
          triplets.push_back({r, c, h * rule.weights[q] * s.derivs[a] * s.derivs[b]});
        }
      }
    }
  }
  return symmetrize(SparseMatrix::from_triplets(next, next, std::move(triplets)));
}

}  // namespace igamg
