// igamg: assemble a benchmark (or read one from Matrix Market files),
// build the aggregation hierarchy and solve.
//
//   igamg --problem cube --k 12 --p 3
//   igamg --problem ring --k 12 24 --p 2 3 --format csv
//   igamg --problem cube --k 12 --p 3 --emit-mtx /tmp/cube
//   igamg --matrix /tmp/cube.mtx --rhs /tmp/cube_rhs.mtx

#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "igamg/bench.hpp"
#include "igamg/benchmarks.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Isogeometric Poisson benchmarks with matching-based AMG"};
  igamg::RunConfig cfg;
  std::vector<int> ks{cfg.k};
  std::vector<int> ps{cfg.p};
  std::string format = "json";
  std::string output;
  std::string emit;
  bool smooth = cfg.smooth_prolongation;

  app.add_option("--problem", cfg.problem, "cube, lshape, ring or external")
      ->check(CLI::IsMember({"cube", "lshape", "ring", "external"}));
  app.add_option("--k", ks, "Uniform spans per direction (several values for a sweep)");
  app.add_option("--p", ps, "Spline degree (several values for a sweep)");
  app.add_option("--aggregate-size", cfg.aggregate_size, "Target aggregate size")
      ->check(CLI::IsMember({2, 4, 8}));
  app.add_option("--smooth-prolongation", smooth, "Smooth the prolongation (on/off)")
      ->transform(CLI::CheckedTransformer(std::map<std::string, bool>{{"on", true}, {"off", false}}));
  app.add_option("--smoother", cfg.smoother, "cheb or l1jacobi")
      ->check(CLI::IsMember({"cheb", "l1jacobi"}));
  app.add_option("--cheb-degree", cfg.cheb_degree, "Chebyshev degree (default from p)")
      ->check(CLI::PositiveNumber);
  app.add_option("--sweeps", cfg.sweeps, "Pre/post smoother applications per level")
      ->check(CLI::PositiveNumber);
  app.add_option("--coarse", cfg.coarse, "pcg or l1jac30")->check(CLI::IsMember({"pcg", "l1jac30"}));
  app.add_option("--krylov", cfg.krylov, "fcg or cg")->check(CLI::IsMember({"fcg", "cg"}));
  app.add_option("--rtol", cfg.rtol, "Relative residual tolerance");
  app.add_option("--maxit", cfg.maxit, "Iteration limit")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Seed for the spectral estimates");
  app.add_option("--matrix", cfg.matrix_path, "Matrix Market system matrix (external mode)");
  app.add_option("--rhs", cfg.rhs_path, "Matrix Market right-hand side (external mode)");
  app.add_option("--emit-mtx", emit, "Write PREFIX.mtx and PREFIX_rhs.mtx and exit");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output", output, "Write the report here instead of stdout");
  app.add_flag("--error", cfg.compute_error, "Report L2/Linf errors against the exact solution");
  app.add_option("--memory-limit-gb", cfg.memory_limit_gb,
                 "Refuse runs whose estimated footprint exceeds this");
  CLI11_PARSE(app, argc, argv);

  cfg.smooth_prolongation = smooth;
  if (!cfg.matrix_path.empty() && app.count("--problem") == 0) cfg.problem = "external";

  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) {
      std::cerr << "error: cannot open " << output << '\n';
      return 2;
    }
  }
  std::ostream& out = output.empty() ? std::cout : file;

  try {
    if (!emit.empty()) {
      if (ks.size() != 1 || ps.size() != 1 || cfg.problem == "external") {
        std::cerr << "error: --emit-mtx needs a benchmark problem and a single k and p\n";
        return 2;
      }
      const auto system = igamg::assemble_system(igamg::build_benchmark(cfg.problem, ks[0], ps[0]));
      igamg::export_system(system, emit);
      std::cerr << "wrote " << emit << ".mtx and " << emit << "_rhs.mtx (n = " << system.n_free
                << ", nnz = " << system.K.nnz() << ")\n";
      return 0;
    }
    if (format == "csv") {
      if (cfg.problem == "external") {
        std::cerr << "error: CSV sweeps need a benchmark problem\n";
        return 2;
      }
      igamg::sweep(cfg, ks, ps, out);
      return 0;
    }
    if (ks.size() != 1 || ps.size() != 1) {
      std::cerr << "error: several k or p values need --format csv\n";
      return 2;
    }
    cfg.k = ks[0];
    cfg.p = ps[0];
    const igamg::BenchReport report = igamg::run_benchmark(cfg);
    out << igamg::report_to_json(report) << '\n';
    return report.converged ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
