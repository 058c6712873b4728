#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "helpers.hpp"
#include "igamg/aggregation.hpp"
#include "igamg/assembly.hpp"
#include "igamg/benchmarks.hpp"

using namespace igamg;
using testing::from_dense;
using testing::to_dense;

namespace {

SparseMatrix laplace2() { return from_dense((Eigen::MatrixXd(2, 2) << 2, -1, -1, 2).finished(), true); }

SparseMatrix path_laplacian(int n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    d(i, i) = 2.0;
    if (i + 1 < n) d(i, i + 1) = d(i + 1, i) = -1.0;
  }
  return from_dense(d, true);
}

double log_product(const Matching& m, const std::vector<WeightedEdge>& edges) {
  double s = 0.0;
  for (const auto& [i, j] : m.pairs) {
    for (const auto& e : edges) {
      if (e.i == i && e.j == j) s += std::log(e.c);
    }
  }
  return s;
}

// Exhaustive maximum of the sum of log-weights over matchings that use only
// edges with c > 1, by plain recursion on the lowest free vertex.
double brute_force_best(int n, const std::vector<WeightedEdge>& edges) {
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& e : edges) {
    if (e.c > 1.0) {
      adj[e.i].push_back({e.j, std::log(e.c)});
      adj[e.j].push_back({e.i, std::log(e.c)});
    }
  }
  std::vector<bool> used(n, false);
  std::function<double(int)> rec = [&](int v) -> double {
    while (v < n && used[v]) ++v;
    if (v == n) return 0.0;
    used[v] = true;
    double best = rec(v + 1);
    for (auto [u, w] : adj[v]) {
      if (used[u]) continue;
      used[u] = true;
      best = std::max(best, w + rec(v + 1));
      used[u] = false;
    }
    used[v] = false;
    return best;
  };
  return rec(0);
}

// Exact optimum for banded graphs (|i - j| <= band) by dynamic programming
// over the matched-state of the next `band` vertices.
double banded_best(int n, int band, const std::vector<WeightedEdge>& edges) {
  std::vector<std::vector<double>> w(n, std::vector<double>(band + 1, -1.0));
  for (const auto& e : edges) {
    if (e.c > 1.0) w[e.i][e.j - e.i] = std::log(e.c);
  }
  const std::size_t states = std::size_t{1} << band;
  std::vector<double> cur(states, -INFINITY), next(states);
  cur[0] = 0.0;
  // bit b of the mask: vertex v + b is already matched (to an earlier vertex)
  for (int v = 0; v < n; ++v) {
    std::fill(next.begin(), next.end(), -INFINITY);
    for (std::size_t mask = 0; mask < states; ++mask) {
      if (cur[mask] == -INFINITY) continue;
      const bool taken = mask & 1u;
      const std::size_t shifted = mask >> 1;
      next[shifted] = std::max(next[shifted], cur[mask]);
      if (taken) continue;
      for (int d = 1; d <= band && v + d < n; ++d) {
        if (w[v][d] < 0.0) continue;
        const std::size_t bit = std::size_t{1} << (d - 1);
        if (shifted & bit) continue;
        next[shifted | bit] = std::max(next[shifted | bit], cur[mask] + w[v][d]);
      }
    }
    std::swap(cur, next);
  }
  return *std::max_element(cur.begin(), cur.end());
}

std::vector<WeightedEdge> random_banded_edges(int n, int band, double density, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> coin(0.0, 1.0), weight(0.2, 2.0);
  std::vector<WeightedEdge> edges;
  for (int i = 0; i < n; ++i) {
    for (int d = 1; d <= band && i + d < n; ++d) {
      if (coin(gen) < density) edges.push_back({i, i + d, weight(gen)});
    }
  }
  return edges;
}

bool is_partition(const Matching& m, Index n) {
  std::vector<int> seen(n, 0);
  for (const auto& [i, j] : m.pairs) {
    if (i >= j) return false;
    ++seen[i];
    ++seen[j];
  }
  for (Index s : m.singletons) ++seen[s];
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

}  // namespace

TEST_CASE("test vector") {
  CHECK(compute_test_vector(path_laplacian(5), 0) == Vector(5, 1.0));
  // one sweep on [[2,-1],[-1,2]]: 1 - (1/3) K 1 = (2/3, 2/3), normalized to ones
  CHECK(compute_test_vector(laplace2(), 1) == Vector{1.0, 1.0});
  // dense fixed-point oracle for three sweeps
  std::mt19937_64 gen(2);
  const Eigen::MatrixXd k = testing::random_spd(25, 0.2, gen);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(25);
  Eigen::VectorXd d(25);
  for (int i = 0; i < 25; ++i) d[i] = k.row(i).cwiseAbs().sum();
  for (int s = 0; s < 3; ++s) w = w - (k * w).cwiseQuotient(d);
  w /= w.cwiseAbs().maxCoeff();
  const Vector got = compute_test_vector(from_dense(k, true), 3);
  CHECK((testing::to_eigen(got) - w).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("edge weights") {
  const auto e1 = edge_weights(laplace2(), Vector{1, 1});
  REQUIRE(e1.size() == 1);
  CHECK(e1[0].c == doctest::Approx(1.5));
  CHECK(edge_weights(laplace2(), Vector{1, -1})[0].c == doctest::Approx(0.5));
  const SparseMatrix with_zero =
      SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 0.0}, {1, 0, 0.0}, {1, 1, 1.0}});
  CHECK(edge_weights(with_zero, Vector{1, 1})[0].c == 1.0);
  CHECK(edge_weights(laplace2(), Vector{1, 1}, 1.6).empty());
  const SparseMatrix zero_diag = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
  CHECK_THROWS_AS(edge_weights(zero_diag, Vector{1, 1}), std::domain_error);
}

TEST_CASE("greedy matching examples") {
  const std::vector<WeightedEdge> path4{{0, 1, 1.5}, {1, 2, 1.2}, {2, 3, 1.5}};
  const Matching m4 = max_product_matching(path4, 4);
  CHECK(m4.pairs == std::vector<std::array<Index, 2>>{{0, 1}, {2, 3}});
  CHECK(m4.singletons.empty());
  CHECK(std::exp(log_product(m4, path4)) == doctest::Approx(2.25));
  CHECK(log_product(m4, path4) == doctest::Approx(brute_force_best(4, path4)));

  const std::vector<WeightedEdge> path3{{0, 1, 2.0}, {1, 2, 1.5}};
  const Matching m3 = max_product_matching(path3, 3);
  CHECK(m3.pairs == std::vector<std::array<Index, 2>>{{0, 1}});
  CHECK(m3.singletons == std::vector<Index>{2});
  CHECK(log_product(m3, path3) == doctest::Approx(brute_force_best(3, path3)));

  const std::vector<WeightedEdge> weak{{0, 1, 1.0}, {1, 2, 0.5}};
  const Matching none = max_product_matching(weak, 3);
  CHECK(none.pairs.empty());
  CHECK(none.singletons == std::vector<Index>{0, 1, 2});
}

TEST_CASE("ties are broken by index") {
  const std::vector<WeightedEdge> e{{2, 3, 1.5}, {1, 2, 1.5}, {0, 1, 1.5}};
  const Matching m = max_product_matching(e, 4);
  CHECK(m.pairs == std::vector<std::array<Index, 2>>{{0, 1}, {2, 3}});
}

TEST_CASE("DP oracle agrees with plain recursion") {
  std::mt19937_64 gen(21);
  std::uniform_int_distribution<int> size(2, 12), bands(1, 4);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = size(gen), band = bands(gen);
    const auto edges = random_banded_edges(n, band, 0.6, gen);
    CHECK(banded_best(n, band, edges) == doctest::Approx(brute_force_best(n, edges)).epsilon(1e-12));
  }
}

TEST_CASE("property: greedy matching is a half approximation in log space") {
  std::mt19937_64 gen(23);
  std::uniform_int_distribution<int> size(2, 64), bands(1, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(gen), band = bands(gen);
    const auto edges = random_banded_edges(n, band, 0.5, gen);
    const Matching m = max_product_matching(edges, n);
    REQUIRE(is_partition(m, n));
    const double greedy = log_product(m, edges);
    const double best = banded_best(n, band, edges);
    CHECK(greedy <= best + 1e-12);
    CHECK(greedy >= 0.5 * best - 1e-12);
  }
}

TEST_CASE("prolongation") {
  Matching m;
  m.pairs = {{0, 1}};
  m.singletons = {2};
  const SparseMatrix p = pairwise_prolongation(m, Vector{1, 1, -2}, 3);
  CHECK(p.cols() == 2);
  CHECK(p.coeff(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(p.coeff(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(p.coeff(2, 1) == -1.0);
  const Eigen::MatrixXd ptp = to_dense(p).transpose() * to_dense(p);
  CHECK((ptp - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  Matching bad;
  bad.pairs = {{0, 1}};
  CHECK_THROWS(pairwise_prolongation(bad, Vector{1, 1, 1}, 3));
}

TEST_CASE("two-step level on a path") {
  const SparseMatrix k = path_laplacian(4);
  AggregationConfig cfg;
  cfg.target_aggregate_size = 2;
  cfg.smooth_prolongation = false;
  const LevelBuild lb = build_level(k, Vector(4, 1.0), cfg);
  CHECK(lb.steps == 1);
  CHECK(lb.p.cols() == 2);
  const Eigen::MatrixXd oracle = to_dense(lb.p).transpose() * to_dense(k) * to_dense(lb.p);
  CHECK((to_dense(lb.k_coarse) - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("composite prolongations are orthonormal and coarse sizes bounded") {
  const AssembledSystem s = assemble_system(build_benchmark("cube", 6, 2));
  AggregationConfig cfg;
  cfg.smooth_prolongation = false;
  const LevelBuild lb = build_level(s.K, Vector(s.n_free, 1.0), cfg);
  CHECK(lb.steps == 3);
  CHECK(lb.p.cols() * 8 >= s.n_free);
  const Eigen::MatrixXd p = to_dense(lb.p);
  CHECK((p.transpose() * p - Eigen::MatrixXd::Identity(p.cols(), p.cols())).cwiseAbs().maxCoeff() <
        1e-13);
  const Eigen::MatrixXd oracle = p.transpose() * to_dense(s.K) * p;
  CHECK((to_dense(lb.k_coarse) - oracle).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("smoothed prolongation") {
  const AssembledSystem s = assemble_system(build_benchmark("cube", 5, 2));
  AggregationConfig cfg;
  const LevelBuild lb = build_level(s.K, Vector(s.n_free, 1.0), cfg);
  CHECK(lb.omega > 0.0);
  AggregationConfig plain = cfg;
  plain.smooth_prolongation = false;
  const LevelBuild lt = build_level(s.K, Vector(s.n_free, 1.0), plain);
  const Eigen::MatrixXd k = to_dense(s.K);
  Eigen::VectorXd dinv = k.diagonal().cwiseInverse();
  const Eigen::MatrixXd expected =
      (Eigen::MatrixXd::Identity(k.rows(), k.cols()) - lb.omega * dinv.asDiagonal() * k) *
      to_dense(lt.p);
  CHECK((to_dense(lb.p) - expected).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::MatrixXd oracle = to_dense(lb.p).transpose() * k * to_dense(lb.p);
  CHECK((to_dense(lb.k_coarse) - oracle).cwiseAbs().maxCoeff() <= 1e-10 * oracle.cwiseAbs().maxCoeff());
}

TEST_CASE("coarse quadratic form of the aggregated constant") {
  // With w = 1 and unsmoothed P, P^T 1 holds sqrt(|aggregate|) per column,
  // so (P^T 1)^T K_c (P^T 1) = 1^T K 1.
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd kd = testing::random_spd(60, 0.15, gen);
    const SparseMatrix k = from_dense(kd, true);
    AggregationConfig cfg;
    cfg.smooth_prolongation = false;
    cfg.target_aggregate_size = 4;
    const LevelBuild lb = build_level(k, Vector(60, 1.0), cfg);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(60);
    const Eigen::VectorXd pc = to_dense(lb.p).transpose() * one;
    CHECK((to_dense(lb.p) * pc - one).cwiseAbs().maxCoeff() < 1e-12);
    const double fine = one.dot(kd * one);
    const double coarse = pc.dot(to_dense(lb.k_coarse) * pc);
    CHECK(coarse == doctest::Approx(fine).epsilon(1e-10));
  }
}

TEST_CASE("matching breakdown") {
  // Diagonal matrix: no edges, so nothing can be paired.
  const SparseMatrix k = SparseMatrix::identity(100);
  AggregationConfig cfg;
  const Hierarchy h = build_hierarchy(k, cfg);
  CHECK(h.breakdown);
  CHECK(h.levels.size() == 2);
  CHECK(h.size(1) == 100);
}

TEST_CASE("hierarchy and operator complexity") {
  const Hierarchy single = build_hierarchy(path_laplacian(40), AggregationConfig{});
  CHECK(single.levels.size() == 1);
  CHECK(single.opc == 1.0);

  const std::vector<std::size_t> a{100, 30};
  CHECK(operator_complexity(a) == doctest::Approx(1.3));
  const std::vector<std::size_t> b{1000, 250, 60};
  CHECK(operator_complexity(b) == doctest::Approx(1.31));

  const AssembledSystem s = assemble_system(build_benchmark("cube", 12, 3));
  const Hierarchy h = build_hierarchy(s.K, AggregationConfig{});
  CHECK(h.levels.back().k.rows() <= 50);
  CHECK(h.opc == doctest::Approx(1.20).epsilon(0.15 / 1.20));
  double partial = 1.0;
  for (std::size_t l = 1; l < h.levels.size(); ++l) {
    const double next = partial + static_cast<double>(h.levels[l].k.nnz()) / s.K.nnz();
    CHECK(next > partial);
    partial = next;
  }
  CHECK(partial == doctest::Approx(h.opc));
  CHECK(h.summary().find("operator complexity") != std::string::npos);
}

TEST_CASE("configuration validation") {
  AggregationConfig cfg;
  cfg.target_aggregate_size = 3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = AggregationConfig{};
  cfg.omega = 2.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK(AggregationConfig{}.matching_steps() == 3);
}
