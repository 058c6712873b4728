#include "igamg/solver.hpp"

#include <chrono>
#include <cmath>

#include "igamg/matrix_market.hpp"

namespace igamg {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Multigrid::Multigrid(Hierarchy hierarchy, CycleConfig cfg)
    : hierarchy_(std::move(hierarchy)), cfg_(cfg) {
  if (hierarchy_.levels.empty()) throw std::invalid_argument("Multigrid: empty hierarchy");
  if (cfg_.sweeps < 0) throw std::invalid_argument("Multigrid: negative sweep count");
  const std::size_t nl = hierarchy_.levels.size();
  for (std::size_t l = 0; l + 1 < nl; ++l) {
    const SparseMatrix& k = hierarchy_.levels[l].k;
    switch (cfg_.smoother) {
      case SmootherKind::ChebyshevL1:
        smoothers_.push_back(SmootherState::chebyshev(k, cfg_.degree));
        break;
      case SmootherKind::L1Jacobi:
        smoothers_.push_back(SmootherState::l1_jacobi(k));
        break;
      case SmootherKind::WeightedJacobi: {
        const double lambda = estimate_lambda_max(k, k.diagonal(), 20, hierarchy_.config.seed);
        smoothers_.push_back(SmootherState::weighted_jacobi(k, 4.0 / (3.0 * lambda)));
        break;
      }
    }
    restrictions_.push_back(transpose(hierarchy_.levels[l].p));
  }
  coarse_ = CoarseSolver(hierarchy_.levels.back().k, cfg_.coarse, hierarchy_.config.seed);
}

void Multigrid::apply(std::span<const double> r, std::span<double> e) const {
  const auto n = static_cast<std::size_t>(matrix().rows());
  if (r.size() != n || e.size() != n) throw DimensionError("Multigrid::apply: length mismatch");
  cycle(0, r, e);
}

Vector Multigrid::apply(std::span<const double> r) const {
  Vector e(r.size());
  apply(r, e);
  return e;
}

void Multigrid::cycle(std::size_t level, std::span<const double> r, std::span<double> e) const {
  const auto& lv = hierarchy_.levels[level];
  if (level + 1 == hierarchy_.levels.size()) {
    const CoarseSolveResult c = coarse_.solve(lv.k, r);
    std::copy(c.x.begin(), c.x.end(), e.begin());
    return;
  }
  std::fill(e.begin(), e.end(), 0.0);
  smooth(lv.k, smoothers_[level], r, e, cfg_.sweeps);
  Vector res(r.size());
  residual(lv.k, r, e, res);
  const SparseMatrix& rt = restrictions_[level];
  Vector rc(rt.rows()), ec(rt.rows());
  spmv(rt, res, rc);
  cycle(level + 1, rc, ec);
  spmv(lv.p, ec, res);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += res[i];
  smooth(lv.k, smoothers_[level], r, e, cfg_.sweeps);
}

Vector vcycle_apply(const Multigrid& mg, std::span<const double> r) { return mg.apply(r); }

Preconditioner identity_preconditioner() {
  return [](std::span<const double> r, std::span<double> z) {
    std::copy(r.begin(), r.end(), z.begin());
  };
}

Preconditioner multigrid_preconditioner(const Multigrid& mg) {
  return [&mg](std::span<const double> r, std::span<double> z) { mg.apply(r, z); };
}

KrylovResult krylov_solve(const SparseMatrix& k, std::span<const double> f,
                          const Preconditioner& b, const KrylovConfig& cfg) {
  const auto n = static_cast<std::size_t>(k.rows());
  if (k.rows() != k.cols() || f.size() != n) {
    throw DimensionError("krylov_solve: K must be square and match F");
  }
  require_finite(f, "right-hand side");
  const auto t0 = std::chrono::steady_clock::now();
  KrylovResult out;
  out.u.assign(n, 0.0);
  SolverReport& rep = out.report;
  rep.relative_residual_history.push_back(1.0);
  const double fnorm = norm2(f);
  if (fnorm == 0.0) {
    rep.converged = true;
    return out;
  }
  Vector r(f.begin(), f.end()), z(n), p(n), q(n), p_old, q_old;
  double rz_old = 0.0, pq_old = 0.0;
  for (int it = 1; it <= cfg.maxit; ++it) {
    b(r, z);
    const double rz = dot(r, z);
    if (!(rz > 0.0)) {
      throw PreconditionerBreakdown("preconditioner is not positive definite (<z, r> = " +
                                    std::to_string(rz) + " at iteration " + std::to_string(it) +
                                    ")");
    }
    if (it == 1) {
      p = z;
    } else {
      const double beta =
          cfg.variant == KrylovVariant::CG ? rz / rz_old : -dot(z, q_old) / pq_old;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p_old[i];
    }
    spmv(k, p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) {
      throw PreconditionerBreakdown("search direction with nonpositive curvature at iteration " +
                                    std::to_string(it) + "; the system is not SPD");
    }
    const double alpha = (cfg.variant == KrylovVariant::CG ? rz : dot(p, r)) / pq;
    axpby(alpha, p, 1.0, out.u);
    residual(k, f, out.u, r);
    const double rel = norm2(r) / fnorm;
    rep.relative_residual_history.push_back(rel);
    rep.iterations = it;
    if (!std::isfinite(rel)) break;
    if (rel <= cfg.rtol) {
      rep.converged = true;
      break;
    }
    p_old = p;
    q_old = q;
    rz_old = rz;
    pq_old = pq;
  }
  rep.solve_seconds = seconds_since(t0);
  return out;
}

MultigridSolve solve_with_multigrid(SparseMatrix k, std::span<const double> f,
                                    const SolverConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Multigrid mg(build_hierarchy(std::move(k), cfg.aggregation), cfg.cycle);
  const double setup = seconds_since(t0);
  MultigridSolve out;
  out.result = krylov_solve(mg.matrix(), f, multigrid_preconditioner(mg), cfg.krylov);
  out.result.report.setup_seconds = setup;
  out.result.report.opc = mg.hierarchy().opc;
  out.breakdown = mg.hierarchy().breakdown;
  for (const auto& l : mg.hierarchy().levels) {
    out.level_sizes.push_back(l.k.rows());
    out.level_nnz.push_back(l.k.nnz());
  }
  return out;
}

MultigridSolve solve_external(const std::string& matrix_path,
                              const std::optional<std::string>& rhs_path,
                              const SolverConfig& cfg) {
  SparseMatrix k = read_matrix_market(matrix_path);
  if (k.rows() != k.cols()) throw NotSymmetricError(matrix_path + ": matrix is not square");
  const double scale = norm_inf(k.values());
  if (k.max_asymmetry() > 1e-12 * scale) {
    throw NotSymmetricError(matrix_path + ": matrix is not symmetric");
  }
  if (!k.symmetric_hint()) k = symmetrize(k);
  Vector f;
  if (rhs_path) {
    f = read_matrix_market_vector(*rhs_path);
    if (f.size() != static_cast<std::size_t>(k.rows())) {
      throw DimensionError(*rhs_path + ": right-hand side length does not match the matrix");
    }
  } else {
    f = spmv(k, Vector(k.rows(), 1.0));
  }
  return solve_with_multigrid(std::move(k), f, cfg);
}

}  // namespace igamg
