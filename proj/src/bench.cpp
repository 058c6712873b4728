#include "igamg/bench.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "igamg/benchmarks.hpp"
#include "igamg/matrix_market.hpp"

namespace igamg {

namespace {

using nlohmann::ordered_json;

// Bytes per stored entry of K at the peak of assembly plus hierarchy setup
// (pattern, CSR arrays, edge list, smoothed-prolongation temporaries).
constexpr double kBytesPerEntry = 34.0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["problem"] = c.problem;
  j["k"] = c.k;
  j["p"] = c.p;
  j["aggregate_size"] = c.aggregate_size;
  j["smooth_prolongation"] = c.smooth_prolongation;
  j["smoother"] = c.smoother;
  j["cheb_degree"] = c.effective_cheb_degree();
  j["sweeps"] = c.sweeps;
  j["coarse"] = c.coarse;
  j["krylov"] = c.krylov;
  j["rtol"] = c.rtol;
  j["maxit"] = c.maxit;
  j["seed"] = c.seed;
  j["matrix"] = c.matrix_path.empty() ? ordered_json(nullptr) : ordered_json(c.matrix_path);
  j["rhs"] = c.rhs_path.empty() ? ordered_json(nullptr) : ordered_json(c.rhs_path);
  j["compute_error"] = c.compute_error;
  return j;
}

template <typename T>
ordered_json optional_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

void RunConfig::validate() const {
  const bool external = problem == "external";
  if (!external && problem != "cube" && problem != "lshape" && problem != "ring") {
    throw std::invalid_argument("unknown problem '" + problem + "'");
  }
  if (external && matrix_path.empty()) {
    throw std::invalid_argument("external problem needs a matrix file");
  }
  if (!external && (k < 4 || k > 96)) throw std::invalid_argument("k must be in 4..96");
  if (!external && (p < 2 || p > 6)) throw std::invalid_argument("p must be in 2..6");
  if (smoother != "cheb" && smoother != "l1jacobi") {
    throw std::invalid_argument("smoother must be cheb or l1jacobi");
  }
  if (coarse != "pcg" && coarse != "l1jac30") {
    throw std::invalid_argument("coarse solver must be pcg or l1jac30");
  }
  if (krylov != "fcg" && krylov != "cg") throw std::invalid_argument("krylov must be fcg or cg");
  if (cheb_degree < 0) throw std::invalid_argument("Chebyshev degree must be positive");
  if (sweeps < 1) throw std::invalid_argument("sweeps must be at least 1");
  if (!(rtol > 0.0 && rtol < 1.0)) throw std::invalid_argument("rtol must lie in (0, 1)");
  if (maxit < 1) throw std::invalid_argument("maxit must be at least 1");
  if (!(memory_limit_gb > 0.0)) throw std::invalid_argument("memory limit must be positive");
  solver_config().aggregation.validate();
}

int RunConfig::effective_cheb_degree() const {
  if (cheb_degree > 0) return cheb_degree;
  return problem == "external" ? 8 : default_chebyshev_degree(p);
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig s;
  s.aggregation.target_aggregate_size = aggregate_size;
  s.aggregation.smooth_prolongation = smooth_prolongation;
  s.aggregation.seed = seed;
  s.cycle.smoother = smoother == "cheb" ? SmootherKind::ChebyshevL1 : SmootherKind::L1Jacobi;
  s.cycle.degree = effective_cheb_degree();
  s.cycle.sweeps = sweeps;
  s.cycle.coarse.mode = coarse == "pcg" ? CoarseMode::Pcg : CoarseMode::L1Jacobi30;
  s.krylov.variant = krylov == "fcg" ? KrylovVariant::FCG : KrylovVariant::CG;
  s.krylov.rtol = rtol;
  s.krylov.maxit = maxit;
  return s;
}

std::size_t estimate_nnz(const Problem& problem, const DofMap& dofs) {
  std::size_t total = 0;
  for (std::size_t pi = 0; pi < problem.patches.size(); ++pi) {
    const Patch& patch = problem.patches[pi];
    const auto n = patch.solution_shape();
    std::array<std::vector<std::size_t>, 3> counts;
    for (int d = 0; d < 3; ++d) {
      for (const auto& nb : patch.solution_knots[d].support_neighbors()) {
        counts[d].push_back(nb.size());
      }
    }
    const auto& l2g = dofs.patch_to_global[pi];
    std::size_t l = 0;
    for (int i2 = 0; i2 < n[2]; ++i2) {
      for (int i1 = 0; i1 < n[1]; ++i1) {
        for (int i0 = 0; i0 < n[0]; ++i0, ++l) {
          if (dofs.free_index[l2g[l]] >= 0) total += counts[0][i0] * counts[1][i1] * counts[2][i2];
        }
      }
    }
  }
  return total;
}

BenchReport run_benchmark(const RunConfig& cfg) {
  cfg.validate();
  BenchReport rep;
  rep.config = cfg;
  const SolverConfig scfg = cfg.solver_config();
  MultigridSolve res;
  if (cfg.problem == "external") {
    res = solve_external(cfg.matrix_path,
                         cfg.rhs_path.empty() ? std::nullopt : std::optional(cfg.rhs_path), scfg);
    rep.n_free = res.level_sizes.front();
    rep.nnz = res.level_nnz.front();
  } else {
    const Problem problem = build_benchmark(cfg.problem, cfg.k, cfg.p);
    {
      const DofMap dofs = build_dof_map(problem);
      const double bytes = kBytesPerEntry * static_cast<double>(estimate_nnz(problem, dofs));
      if (bytes > cfg.memory_limit_gb * 1e9) {
        std::ostringstream msg;
        msg << "estimated footprint " << bytes / 1e9 << " GB exceeds the limit of "
            << cfg.memory_limit_gb << " GB";
        throw ResourceLimitError(msg.str());
      }
    }
    const auto t0 = std::chrono::steady_clock::now();
    AssembledSystem sys = assemble_system(problem);
    rep.assembly_seconds = seconds_since(t0);
    rep.n_free = sys.n_free;
    rep.nnz = sys.K.nnz();
    res = solve_with_multigrid(std::move(sys.K), sys.F, scfg);
    if (cfg.compute_error) {
      const SolutionError err = solution_error(problem, sys, res.result.u);
      rep.l2_error = err.l2;
      rep.linf_error = err.linf;
    }
  }
  const SolverReport& sr = res.result.report;
  rep.level_sizes = res.level_sizes;
  rep.level_nnz = res.level_nnz;
  rep.opc = sr.opc;
  rep.iterations = sr.iterations;
  rep.converged = sr.converged;
  rep.matching_breakdown = res.breakdown;
  rep.residual_history = sr.relative_residual_history;
  rep.setup_seconds = sr.setup_seconds;
  rep.solve_seconds = sr.solve_seconds;
  return rep;
}

const std::vector<std::string>& report_fields() {
  static const std::vector<std::string> fields = {
      "problem",          "k",
      "p",                "n_free",
      "nnz",              "levels",
      "level_sizes",      "level_nnz",
      "opc",              "iterations",
      "converged",        "final_relative_residual",
      "residual_history", "matching_breakdown",
      "assembly_seconds", "setup_seconds",
      "solve_seconds",    "l2_error",
      "linf_error",       "config",
  };
  return fields;
}

std::string report_to_json(const BenchReport& r, int indent) {
  const bool external = r.config.problem == "external";
  ordered_json j;
  j["problem"] = r.config.problem;
  j["k"] = external ? ordered_json(nullptr) : ordered_json(r.config.k);
  j["p"] = external ? ordered_json(nullptr) : ordered_json(r.config.p);
  j["n_free"] = r.n_free;
  j["nnz"] = r.nnz;
  j["levels"] = r.level_sizes.size();
  j["level_sizes"] = r.level_sizes;
  j["level_nnz"] = r.level_nnz;
  j["opc"] = r.opc;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["final_relative_residual"] =
      r.residual_history.empty() ? ordered_json(nullptr) : ordered_json(r.residual_history.back());
  j["residual_history"] = r.residual_history;
  j["matching_breakdown"] = r.matching_breakdown;
  j["assembly_seconds"] = r.assembly_seconds;
  j["setup_seconds"] = r.setup_seconds;
  j["solve_seconds"] = r.solve_seconds;
  j["l2_error"] = optional_json(r.l2_error);
  j["linf_error"] = optional_json(r.linf_error);
  j["config"] = config_json(r.config);
  return j.dump(indent);
}

void sweep(const RunConfig& base, std::span<const int> ks, std::span<const int> ps,
           std::ostream& out) {
  out << "problem,k,p,n_free,nnz,levels,opc,iterations,converged,setup_seconds,solve_seconds\n";
  for (int k : ks) {
    for (int p : ps) {
      RunConfig cfg = base;
      cfg.k = k;
      cfg.p = p;
      out << cfg.problem << ',' << k << ',' << p << ',';
      try {
        const BenchReport r = run_benchmark(cfg);
        std::ostringstream row;
        row.precision(6);
        row << r.n_free << ',' << r.nnz << ',' << r.level_sizes.size() << ',' << r.opc << ','
            << r.iterations << ',' << (r.converged ? "true" : "false") << ',' << r.setup_seconds
            << ',' << r.solve_seconds;
        out << row.str() << '\n';
      } catch (const std::exception&) {
        out << "ERR,ERR,ERR,ERR,ERR,ERR,ERR,ERR\n";
      }
      out.flush();
    }
  }
}

std::string sweep_csv(const RunConfig& base, std::span<const int> ks, std::span<const int> ps) {
  std::ostringstream os;
  sweep(base, ks, ps, os);
  return os.str();
}

void export_system(const AssembledSystem& system, const std::string& prefix) {
  write_matrix_market(prefix + ".mtx", system.K, MatrixMarketSymmetry::Symmetric);
  write_matrix_market_vector(prefix + "_rhs.mtx", system.F);
}

}  // namespace igamg
