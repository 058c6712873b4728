#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "igamg/assembly.hpp"
#include "igamg/bench.hpp"
#include "igamg/benchmarks.hpp"
#include "igamg/solver.hpp"

namespace py = pybind11;
using namespace igamg;

namespace {

template <typename T>
py::array_t<T> to_array(std::span<const T> v) {
  py::array_t<T> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

template <typename T>
std::vector<T> to_vector(const py::array_t<T, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
  return std::vector<T>(a.data(), a.data() + a.size());
}

py::dict csr_dict(const SparseMatrix& k) {
  py::dict d;
  d["shape"] = py::make_tuple(k.rows(), k.cols());
  d["indptr"] = to_array<std::size_t>(k.row_offsets());
  d["indices"] = to_array<Index>(k.col_indices());
  d["data"] = to_array<double>(k.values());
  return d;
}

py::object parse_json(const std::string& s) {
  return py::module_::import("json").attr("loads")(s);
}

RunConfig run_config(const py::dict& options) {
  RunConfig c;
  for (const auto& [key, value] : options) {
    const auto name = key.cast<std::string>();
    if (name == "problem") c.problem = value.cast<std::string>();
    else if (name == "k") c.k = value.cast<int>();
    else if (name == "p") c.p = value.cast<int>();
    else if (name == "aggregate_size") c.aggregate_size = value.cast<int>();
    else if (name == "smooth_prolongation") c.smooth_prolongation = value.cast<bool>();
    else if (name == "smoother") c.smoother = value.cast<std::string>();
    else if (name == "cheb_degree") c.cheb_degree = value.cast<int>();
    else if (name == "sweeps") c.sweeps = value.cast<int>();
    else if (name == "coarse") c.coarse = value.cast<std::string>();
    else if (name == "krylov") c.krylov = value.cast<std::string>();
    else if (name == "rtol") c.rtol = value.cast<double>();
    else if (name == "maxit") c.maxit = value.cast<int>();
    else if (name == "seed") c.seed = value.cast<std::uint64_t>();
    else if (name == "matrix_path") c.matrix_path = value.cast<std::string>();
    else if (name == "rhs_path") c.rhs_path = value.cast<std::string>();
    else if (name == "compute_error") c.compute_error = value.cast<bool>();
    else if (name == "memory_limit_gb") c.memory_limit_gb = value.cast<double>();
    else throw std::invalid_argument("unknown option '" + name + "'");
  }
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_igamg, m) {
  m.doc() = "Aggregation-based algebraic multigrid for spline Poisson problems.";

  py::register_exception<PreconditionerBreakdown>(m, "PreconditionerBreakdown", PyExc_RuntimeError);
  py::register_exception<ResourceLimitError>(m, "ResourceLimitError", PyExc_MemoryError);

  m.def("benchmark_names", &benchmark_names);

  m.def(
      "assemble",
      [](const std::string& name, int k, int p) {
        const AssembledSystem s = assemble_system(build_benchmark(name, k, p));
        py::dict d = csr_dict(s.K);
        d["rhs"] = to_array<double>(s.F);
        d["n_total"] = s.n_total;
        return d;
      },
      py::arg("problem"), py::arg("k"), py::arg("p"),
      "Assembles a benchmark; returns CSR arrays of K and the load vector.");

  m.def(
      "solve",
      [](py::array_t<std::size_t, py::array::c_style | py::array::forcecast> indptr,
         py::array_t<Index, py::array::c_style | py::array::forcecast> indices,
         py::array_t<double, py::array::c_style | py::array::forcecast> data,
         py::array_t<double, py::array::c_style | py::array::forcecast> rhs, const py::dict& options) {
        RunConfig c = run_config(options);
        const auto offsets = to_vector<std::size_t>(indptr);
        if (offsets.empty()) throw std::invalid_argument("indptr must not be empty");
        const auto n = static_cast<Index>(offsets.size() - 1);
        SparseMatrix k(n, n, offsets, to_vector<Index>(indices), to_vector<double>(data));
        if (k.max_asymmetry() > 1e-12 * norm_inf(k.values())) {
          throw std::invalid_argument("matrix is not symmetric");
        }
        const Vector f = to_vector<double>(rhs);
        if (static_cast<Index>(f.size()) != n) throw std::invalid_argument("rhs length mismatch");
        if (c.cheb_degree == 0) c.cheb_degree = 8;
        MultigridSolve r;
        {
          py::gil_scoped_release release;
          r = solve_with_multigrid(symmetrize(k), f, c.solver_config());
        }
        py::dict report;
        report["iterations"] = r.result.report.iterations;
        report["converged"] = r.result.report.converged;
        report["residual_history"] = r.result.report.relative_residual_history;
        report["opc"] = r.result.report.opc;
        report["level_sizes"] = r.level_sizes;
        report["level_nnz"] = r.level_nnz;
        report["setup_seconds"] = r.result.report.setup_seconds;
        report["solve_seconds"] = r.result.report.solve_seconds;
        return py::make_tuple(to_array<double>(r.result.u), report);
      },
      py::arg("indptr"), py::arg("indices"), py::arg("data"), py::arg("rhs"),
      py::arg("options") = py::dict(),
      "Builds the hierarchy for a CSR matrix and solves with preconditioned FCG or CG.");

  m.def(
      "run_benchmark",
      [](const py::dict& options) {
        const RunConfig c = run_config(options);
        std::string json;
        {
          py::gil_scoped_release release;
          json = report_to_json(run_benchmark(c), -1);
        }
        return parse_json(json);
      },
      py::arg("options") = py::dict(), "Runs one benchmark and returns the report as a dict.");

  m.def(
      "sweep_csv",
      [](const py::dict& options, const std::vector<int>& ks, const std::vector<int>& ps) {
        RunConfig c = run_config(options);
        py::gil_scoped_release release;
        return igamg::sweep_csv(c, ks, ps);
      },
      py::arg("options"), py::arg("ks"), py::arg("ps"), "CSV table over a (k, p) grid.");

  m.attr("report_fields") = report_fields();
}
