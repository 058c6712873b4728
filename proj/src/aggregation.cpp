#include "igamg/aggregation.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "igamg/smoothing.hpp"

namespace igamg {

namespace {

void normalize_test_vector(Vector& w) {
  const double m = norm_inf(w);
  if (m > 0.0 && std::isfinite(m)) {
    for (auto& v : w) v /= m;
  }
  for (auto& v : w) {
    if (v == 0.0) v = DBL_MIN;
  }
}

}  // namespace

void AggregationConfig::validate() const {
  if (target_aggregate_size != 2 && target_aggregate_size != 4 && target_aggregate_size != 8) {
    throw std::invalid_argument("aggregate size must be 2, 4 or 8");
  }
  if (omega != 0.0 && !(omega > 0.0 && omega < 2.0)) {
    throw std::invalid_argument("prolongation damping must lie in (0, 2)");
  }
  if (test_vector_sweeps < 0) throw std::invalid_argument("test vector sweeps must be >= 0");
  if (coarse_size_threshold < 1) throw std::invalid_argument("coarse size threshold must be >= 1");
  if (max_levels < 1) throw std::invalid_argument("max levels must be >= 1");
  if (power_iterations < 1) throw std::invalid_argument("power iterations must be >= 1");
}

int AggregationConfig::matching_steps() const {
  int m = 0;
  for (int s = target_aggregate_size; s > 1; s /= 2) ++m;
  return m;
}

Vector compute_test_vector(const SparseMatrix& k, int sweeps) {
  Vector w(k.rows(), 1.0);
  if (sweeps > 0) {
    const Vector zero(k.rows(), 0.0);
    w = l1_jacobi_sweeps(k, SmootherState::l1_jacobi(k), zero, w, sweeps);
  }
  normalize_test_vector(w);
  return w;
}

std::vector<WeightedEdge> edge_weights(const SparseMatrix& k, std::span<const double> w,
                                       std::optional<double> keep_above) {
  if (k.rows() != k.cols() || w.size() != static_cast<std::size_t>(k.rows())) {
    throw DimensionError("edge_weights: K must be square and match the test vector");
  }
  const Vector diag = k.diagonal();
  std::vector<WeightedEdge> edges;
  for (Index i = 0; i < k.rows(); ++i) {
    auto rc = k.row_cols(i);
    auto rv = k.row_values(i);
    for (std::size_t q = 0; q < rc.size(); ++q) {
      const Index j = rc[q];
      if (j <= i) continue;
      const double denom = diag[i] * w[i] * w[i] + diag[j] * w[j] * w[j];
      if (denom == 0.0) {
        throw std::domain_error("edge_weights: zero denominator at (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
      }
      const double c = 1.0 - 2.0 * rv[q] * w[i] * w[j] / denom;
      if (!keep_above || c > *keep_above) edges.push_back({i, j, c});
    }
  }
  return edges;
}

Matching max_product_matching(std::span<const WeightedEdge> edges, Index n, double threshold) {
  std::vector<WeightedEdge> eligible;
  for (const auto& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n || e.i == e.j) {
      throw DimensionError("max_product_matching: edge endpoint out of range");
    }
    if (e.c > threshold) {
      eligible.push_back(e.i < e.j ? e : WeightedEdge{e.j, e.i, e.c});
    }
  }
  std::sort(eligible.begin(), eligible.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    if (a.c != b.c) return a.c > b.c;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  Matching m;
  std::vector<bool> matched(n, false);
  for (const auto& e : eligible) {
    if (matched[e.i] || matched[e.j]) continue;
    matched[e.i] = matched[e.j] = true;
    m.pairs.push_back({e.i, e.j});
  }
  for (Index v = 0; v < n; ++v) {
    if (!matched[v]) m.singletons.push_back(v);
  }
  return m;
}

SparseMatrix pairwise_prolongation(const Matching& m, std::span<const double> w, Index n) {
  if (w.size() != static_cast<std::size_t>(n)) {
    throw DimensionError("pairwise_prolongation: test vector length mismatch");
  }
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n));
  Index col = 0;
  for (const auto& [i, j] : m.pairs) {
    const double norm = std::hypot(w[i], w[j]);
    t.push_back({i, col, w[i] / norm});
    t.push_back({j, col, w[j] / norm});
    ++col;
  }
  for (Index s : m.singletons) t.push_back({s, col++, w[s] < 0.0 ? -1.0 : 1.0});
  SparseMatrix p = SparseMatrix::from_triplets(n, col, std::move(t));
  if (p.nnz() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("pairwise_prolongation: matching is not a partition");
  }
  return p;
}

LevelBuild build_level(const SparseMatrix& k, std::span<const double> w,
                       const AggregationConfig& cfg) {
  cfg.validate();
  LevelBuild out;
  const SparseMatrix* kcur = &k;
  SparseMatrix kstep;
  Vector wcur(w.begin(), w.end());
  SparseMatrix p;
  for (int step = 0; step < cfg.matching_steps(); ++step) {
    const Index n = kcur->rows();
    const Matching m =
        max_product_matching(edge_weights(*kcur, wcur, cfg.eligibility_threshold), n,
                             cfg.eligibility_threshold);
    if (m.pairs.empty()) {
      if (step > 0) break;
      out.breakdown = true;
    }
    const SparseMatrix pi = pairwise_prolongation(m, wcur, n);
    SparseMatrix knext = rap(pi, *kcur);
    Vector wnext(pi.cols());
    spmv(transpose(pi), wcur, wnext);
    normalize_test_vector(wnext);
    p = step == 0 ? pi : multiply(p, pi);
    kstep = std::move(knext);
    kcur = &kstep;
    wcur = std::move(wnext);
    ++out.steps;
    if (out.breakdown) break;
  }
  out.w_coarse = std::move(wcur);
  if (cfg.smooth_prolongation && !out.breakdown) {
    const Vector diag = k.diagonal();
    double omega = cfg.omega;
    if (omega == 0.0) {
      omega = 4.0 / (3.0 * estimate_lambda_max(k, diag, cfg.power_iterations, cfg.seed));
    }
    // P_bar = P - omega D^-1 K P
    SparseMatrix kp = multiply(k, p);
    std::vector<std::size_t> offsets(kp.row_offsets().begin(), kp.row_offsets().end());
    std::vector<Index> cols(kp.col_indices().begin(), kp.col_indices().end());
    Vector vals(kp.values().begin(), kp.values().end());
    for (Index i = 0; i < kp.rows(); ++i) {
      for (std::size_t q = offsets[i]; q < offsets[i + 1]; ++q) vals[q] *= -omega / diag[i];
    }
    kp = SparseMatrix(kp.rows(), kp.cols(), std::move(offsets), std::move(cols), std::move(vals));
    out.p = add(1.0, p, 1.0, kp);
    out.omega = omega;
    kstep = SparseMatrix();
    out.k_coarse = rap(out.p, k);
  } else {
    out.p = std::move(p);
    out.k_coarse = std::move(kstep);
  }
  return out;
}

std::string Hierarchy::summary() const {
  std::ostringstream os;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    os << "level " << l << ": n = " << levels[l].k.rows() << ", nnz = " << levels[l].k.nnz();
    if (l + 1 < levels.size()) {
      os << ", mean aggregate size = "
         << static_cast<double>(levels[l].k.rows()) / static_cast<double>(levels[l].p.cols());
    }
    os << '\n';
  }
  os << "operator complexity = " << opc << '\n';
  return os.str();
}

Hierarchy build_hierarchy(SparseMatrix k, const AggregationConfig& cfg) {
  cfg.validate();
  if (k.rows() != k.cols()) throw DimensionError("build_hierarchy: K is not square");
  Hierarchy h;
  h.config = cfg;
  Vector w = compute_test_vector(k, cfg.test_vector_sweeps);
  h.levels.push_back({std::move(k), SparseMatrix(), 0.0});
  while (static_cast<int>(h.levels.size()) < cfg.max_levels &&
         h.levels.back().k.rows() > cfg.coarse_size_threshold) {
    LevelBuild lb = build_level(h.levels.back().k, w, cfg);
    h.levels.back().p = std::move(lb.p);
    h.levels.back().omega = lb.omega;
    h.levels.push_back({std::move(lb.k_coarse), SparseMatrix(), 0.0});
    w = std::move(lb.w_coarse);
    if (lb.breakdown) {
      h.breakdown = true;
      break;
    }
  }
  h.opc = operator_complexity(h);
  return h;
}

double operator_complexity(std::span<const std::size_t> nnz_per_level) {
  if (nnz_per_level.empty() || nnz_per_level[0] == 0) {
    throw std::invalid_argument("operator_complexity: finest level has no entries");
  }
  double total = 0.0;
  for (std::size_t v : nnz_per_level) total += static_cast<double>(v);
  return total / static_cast<double>(nnz_per_level[0]);
}

double operator_complexity(const Hierarchy& h) {
  std::vector<std::size_t> nnz;
  for (const auto& l : h.levels) nnz.push_back(l.k.nnz());
  return operator_complexity(nnz);
}

}  // namespace igamg
