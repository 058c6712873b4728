#include "igamg/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace igamg {

KnotVector::KnotVector(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 0) throw std::invalid_argument("KnotVector: negative degree");
  const auto m = static_cast<int>(knots_.size());
  if (m < 2 * (degree_ + 1)) throw std::invalid_argument("KnotVector: too few knots");
  if (!std::is_sorted(knots_.begin(), knots_.end())) {
    throw std::invalid_argument("KnotVector: knots must be nondecreasing");
  }
  if (!(knots_.front() < knots_.back())) throw std::invalid_argument("KnotVector: empty range");
  for (int i = 0; i <= degree_; ++i) {
    if (knots_[i] != knots_.front() || knots_[m - 1 - i] != knots_.back()) {
      throw std::invalid_argument("KnotVector: end knots must be repeated p+1 times");
    }
  }
  int run = 1;
  for (int i = degree_ + 2; i < m - degree_ - 1; ++i) {
    run = knots_[i] == knots_[i - 1] ? run + 1 : 1;
    if (run > degree_) {
      throw std::invalid_argument("KnotVector: interior knot multiplicity exceeds degree");
    }
  }
  if (degree_ + 1 < m - degree_ - 1 && knots_[degree_ + 1] == knots_.front()) {
    throw std::invalid_argument("KnotVector: end knots repeated more than p+1 times");
  }
}

KnotVector KnotVector::uniform(int spans, int degree) {
  if (spans < 1) throw std::invalid_argument("KnotVector::uniform: need at least one span");
  std::vector<double> knots(degree + 1, 0.0);
  for (int i = 1; i < spans; ++i) knots.push_back(static_cast<double>(i) / spans);
  knots.insert(knots.end(), degree + 1, 1.0);
  return KnotVector(degree, std::move(knots));
}

std::vector<double> KnotVector::breakpoints() const {
  std::vector<double> b(knots_);
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

int KnotVector::find_span(double xi) const {
  if (!(xi >= front() && xi <= back())) {
    throw std::out_of_range("KnotVector: parameter " + std::to_string(xi) + " outside [" +
                            std::to_string(front()) + ", " + std::to_string(back()) + "]");
  }
  const int n = n_basis();
  if (xi >= knots_[n]) return n - 1;
  auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, xi);
  return static_cast<int>(it - knots_.begin()) - 1;
}

double KnotVector::greville(int i) const {
  double s = 0.0;
  for (int j = 1; j <= degree_; ++j) s += knots_[i + j];
  return degree_ == 0 ? 0.5 * (knots_[i] + knots_[i + 1]) : s / degree_;
}

std::vector<std::vector<int>> KnotVector::support_neighbors() const {
  const int n = n_basis();
  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - degree_); j <= std::min(n - 1, i + degree_); ++j) {
      // Supports are [t_i, t_{i+p+1}] and [t_j, t_{j+p+1}].
      const double lo = std::max(knots_[i], knots_[j]);
      const double hi = std::min(knots_[i + degree_ + 1], knots_[j + degree_ + 1]);
      if (hi > lo) out[i].push_back(j);
    }
  }
  return out;
}

BasisEval bspline_eval(const KnotVector& kv, double xi) {
  const int p = kv.degree();
  const int span = kv.find_span(xi);
  const auto t = kv.knots();

  // ndu holds basis functions of increasing degree (upper triangle) and
  // knot differences (lower triangle).
  std::vector<double> ndu((p + 1) * (p + 1), 0.0);
  auto at = [&](int r, int c) -> double& { return ndu[r * (p + 1) + c]; };
  std::vector<double> left(p + 1), right(p + 1);
  at(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = xi - t[span + 1 - j];
    right[j] = t[span + j] - xi;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      at(j, r) = right[r + 1] + left[j - r];
      const double temp = at(r, j - 1) / at(j, r);
      at(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    at(j, j) = saved;
  }

  BasisEval out;
  out.first = span - p;
  out.values.resize(p + 1);
  out.derivs.assign(p + 1, 0.0);
  for (int j = 0; j <= p; ++j) out.values[j] = at(j, p);
  if (p == 0) return out;
  // First derivative: N'_{i,p} = p (N_{i,p-1}/(t_{i+p}-t_i) - N_{i+1,p-1}/(t_{i+p+1}-t_{i+1})).
  for (int r = 0; r <= p; ++r) {
    double d = 0.0;
    if (r >= 1) d += at(r - 1, p - 1) / at(p, r - 1);
    if (r <= p - 1) d -= at(r, p - 1) / at(p, r);
    out.derivs[r] = p * d;
  }
  return out;
}

QuadratureRule gauss_rule(int n) {
  if (n < 1 || n > 16) {
    throw std::out_of_range("gauss_rule: point count " + std::to_string(n) + " not in [1, 16]");
  }
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on the Legendre polynomial P_n over [-1,1], mapped to [0,1].
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.5;
  return rule;
}

}  // namespace igamg
