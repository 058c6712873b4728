#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "igamg/assembly.hpp"
#include "igamg/benchmarks.hpp"
#include "igamg/solver.hpp"

using namespace igamg;

namespace {

Index free_count(const std::string& name, int k, int p) {
  return build_dof_map(build_benchmark(name, k, p)).n_free;
}

Vector direct_solve(const SparseMatrix& k, const Vector& f) {
  const Eigen::MatrixXd d = testing::to_dense(k);
  return testing::to_std(d.llt().solve(testing::to_eigen(f)));
}

}  // namespace

TEST_CASE("benchmark free DoF counts") {
  CHECK(free_count("cube", 12, 3) == 2730);
  CHECK(free_count("cube", 12, 5) == 4080);
  CHECK(free_count("cube", 24, 6) == 24360);
  CHECK(free_count("ring", 12, 2) == 2184);
  CHECK(free_count("ring", 24, 4) == 19656);
  CHECK(free_count("lshape", 12, 2) == 5772);
  CHECK(free_count("lshape", 12, 3) == 7280);
  // (N - 2)(N - 1)N with N = k + p for the cube and the ring
  for (int p = 2; p <= 6; ++p) {
    for (int k : {4, 7, 12}) {
      const Index n = k + p;
      CHECK(free_count("cube", k, p) == (n - 2) * (n - 1) * n);
      CHECK(free_count("ring", k, p) == (n - 2) * (n - 1) * n);
      CHECK(free_count("lshape", k, p) == (n - 2) * (3 * n - 5) * (n - 1));
    }
  }
}

TEST_CASE("benchmark argument validation") {
  CHECK_THROWS_AS(build_benchmark("sphere", 12, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_benchmark("cube", 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_benchmark("cube", 97, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_benchmark("cube", 12, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_benchmark("cube", 12, 7), std::invalid_argument);
}

TEST_CASE("lshape interfaces are detected") {
  const DofMap m = build_dof_map(build_benchmark("lshape", 4, 2));
  CHECK(m.interface_sides.size() == 4);
  const Index n = 6;
  CHECK(m.n_total == 3 * n * n * n - 2 * n * n);
}

TEST_CASE("boundary condition validation") {
  Problem pr = build_benchmark("cube", 4, 2);
  pr.bcs[0].pop_back();
  CHECK_THROWS_AS(build_dof_map(pr), std::invalid_argument);
  pr = build_benchmark("cube", 4, 2);
  pr.bcs[0].push_back({1, BcKind::Neumann, {}});
  CHECK_THROWS_AS(build_dof_map(pr), std::invalid_argument);
  pr = build_benchmark("lshape", 4, 2);
  pr.bcs[0].push_back({2, BcKind::Dirichlet, pr.exact});
  CHECK_THROWS_AS(build_dof_map(pr), std::invalid_argument);
}

TEST_CASE("nonconforming interface is rejected") {
  Problem pr = build_benchmark("lshape", 4, 2);
  pr.patches[1].solution_knots[1] = KnotVector::uniform(5, 2);
  CHECK_THROWS_AS(build_dof_map(pr), NonconformingInterfaceError);
  pr = build_benchmark("lshape", 4, 2);
  pr.patches[1].solution_knots[2] = KnotVector(2, {0, 0, 0, 0.2, 0.5, 0.75, 1, 1, 1});
  CHECK_THROWS_AS(build_dof_map(pr), NonconformingInterfaceError);
}

TEST_CASE("1D stiffness for linear elements") {
  for (int k : {3, 8, 20}) {
    const SparseMatrix a = assemble_stiffness_1d(KnotVector::uniform(k, 1), true, true);
    REQUIRE(a.rows() == k - 1);
    // oracle: (1/h) tridiag(-1, 2, -1)
    Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(k - 1, k - 1);
    for (int i = 0; i < k - 1; ++i) {
      oracle(i, i) = 2.0 * k;
      if (i + 1 < k - 1) oracle(i, i + 1) = oracle(i + 1, i) = -1.0 * k;
    }
    CHECK((testing::to_dense(a) - oracle).cwiseAbs().maxCoeff() <= 1e-12 * k);
  }
}

TEST_CASE("1D quadratic stiffness against exact integrals") {
  // On [0,1] with one element the quadratic Bernstein stiffness is
  // (1/3) [[4,-2,-2],[-2,4,-2],[-2,-2,4]].
  const SparseMatrix a = assemble_stiffness_1d(KnotVector::uniform(1, 2), false, false);
  Eigen::Matrix3d oracle;
  oracle << 4, -2, -2, -2, 4, -2, -2, -2, 4;
  oracle /= 3.0;
  CHECK((testing::to_dense(a) - oracle).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("assembled matrices are symmetric and SPD") {
  for (const auto& name : benchmark_names()) {
    for (int p : {2, 3}) {
      const AssembledSystem s = assemble_system(build_benchmark(name, 4, p));
      CHECK(s.K.rows() == s.n_free);
      CHECK(s.K.symmetric_hint());
      CHECK(s.K.max_asymmetry() == 0.0);
      CHECK(testing::is_spd(testing::to_dense(s.K)));
    }
  }
}

TEST_CASE("stiffness annihilates constants on a pure Neumann cube") {
  Problem pr = build_benchmark("cube", 4, 3);
  for (auto& bc : pr.bcs[0]) {
    bc.kind = BcKind::Neumann;
    bc.datum = {};
  }
  pr.source = {};
  const AssembledSystem s = assemble_system(pr);
  REQUIRE(s.n_free == 7 * 7 * 7);
  const Vector k1 = spmv(s.K, Vector(s.n_free, 1.0));
  CHECK(norm_inf(k1) <= 1e-10);
  CHECK(norm_inf(s.F) == 0.0);
}

TEST_CASE("zero data gives the zero solution") {
  Problem pr = build_benchmark("ring", 4, 2);
  pr.source = [](const Point3&) { return 0.0; };
  pr.exact = [](const Point3&) { return 0.0; };
  for (auto& bc : pr.bcs[0]) bc.datum = [](const Point3&) { return 0.0; };
  const AssembledSystem s = assemble_system(pr);
  CHECK(norm_inf(s.F) == 0.0);
  const SolutionError e = solution_error(pr, s, Vector(s.n_free, 0.0));
  CHECK(e.l2 == 0.0);
  CHECK(e.linf == 0.0);
}

TEST_CASE("polynomial solutions are reproduced exactly") {
  // u = 1 + 2x - y + 3z is in every spline space; f = 0, g_N = du/dn.
  Problem pr = build_benchmark("lshape", 4, 2);
  auto u = [](const Point3& x) { return 1.0 + 2.0 * x.x() - x.y() + 3.0 * x.z(); };
  pr.exact = u;
  pr.source = [](const Point3&) { return 0.0; };
  for (auto& list : pr.bcs) {
    for (auto& bc : list) {
      if (bc.kind == BcKind::Dirichlet) {
        bc.datum = u;
      } else {
        const int side = bc.side;
        bc.datum = [side](const Point3&) { return side == 2 ? 2.0 : -1.0; };
      }
    }
  }
  const AssembledSystem s = assemble_system(pr);
  const SolutionError e = solution_error(pr, s, direct_solve(s.K, s.F));
  CHECK(e.linf < 1e-11);
  CHECK(e.l2 < 1e-11);
}

TEST_CASE("ring approximates linear solutions through the NURBS map") {
  // A linear u is not in the mapped B-spline space; with correct Neumann
  // data the error is small and converges at order p + 1.
  auto u = [](const Point3& x) { return 0.5 * x.x() + x.y() - 2.0 * x.z(); };
  std::vector<double> errors;
  for (int k : {4, 8}) {
    Problem pr = build_benchmark("ring", k, 3);
    pr.exact = u;
    pr.source = [](const Point3&) { return 0.0; };
    for (int s : {0, 1, 2}) pr.bcs[0][s].datum = u;
    pr.bcs[0][3].datum = [](const Point3&) { return -0.5; };
    pr.bcs[0][4].datum = [](const Point3&) { return 2.0; };
    pr.bcs[0][5].datum = [](const Point3&) { return -2.0; };
    const AssembledSystem s = assemble_system(pr);
    errors.push_back(solution_error(pr, s, direct_solve(s.K, s.F)).l2);
  }
  CHECK(errors[0] < 1e-3);
  CHECK(errors[0] / errors[1] > 12.0);
}

TEST_CASE("L2 error decreases under refinement") {
  double previous = INFINITY;
  for (int k : {4, 8, 16}) {
    const Problem pr = build_benchmark("cube", k, 3);
    const AssembledSystem s = assemble_system(pr);
    SolverConfig cfg;
    cfg.krylov.rtol = 1e-12;
    const MultigridSolve sol = solve_with_multigrid(s.K, s.F, cfg);
    REQUIRE(sol.result.report.converged);
    const SolutionError e = solution_error(pr, s, sol.result.u);
    CHECK(e.l2 < previous);
    previous = e.l2;
  }
}

TEST_CASE("expand_solution checks its input") {
  const AssembledSystem s = assemble_system(build_benchmark("cube", 4, 2));
  CHECK_THROWS_AS(expand_solution(s, Vector(3, 0.0)), DimensionError);
  const Vector u = expand_solution(s, Vector(s.n_free, 0.0));
  CHECK(u.size() == static_cast<std::size_t>(s.n_total));
}
