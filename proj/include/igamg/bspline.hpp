#pragma once

#include <span>
#include <vector>

namespace igamg {

/// Open knot vector of degree p: the first and last knots are repeated p+1
/// times and interior multiplicities do not exceed p.
class KnotVector {
 public:
  KnotVector() = default;
  KnotVector(int degree, std::vector<double> knots);

  /// k uniform spans on [0,1] with maximum regularity; n_basis = k + p.
  static KnotVector uniform(int spans, int degree);

  int degree() const { return degree_; }
  int n_basis() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  std::span<const double> knots() const { return knots_; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }

  /// Distinct knot values: element boundaries.
  std::vector<double> breakpoints() const;

  /// Index s with knots[s] <= xi < knots[s+1]; xi == back() maps to the last
  /// nonempty span.
  int find_span(double xi) const;

  /// Greville abscissa of basis function i.
  double greville(int i) const;

  /// Indices j whose support overlaps the support of i on a set of positive
  /// measure (including i itself).
  std::vector<std::vector<int>> support_neighbors() const;

  bool operator==(const KnotVector&) const = default;

 private:
  int degree_ = 0;
  std::vector<double> knots_;
};

struct BasisEval {
  int first = 0;                ///< index of values[0]
  std::vector<double> values;   ///< p+1 nonzero functions at xi
  std::vector<double> derivs;   ///< their first derivatives
};

/// Nonzero basis functions and first derivatives at xi (Cox-de Boor
/// triangular scheme). Throws std::out_of_range outside the knot range.
BasisEval bspline_eval(const KnotVector& kv, double xi);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [0,1], 1 <= n <= 16.
QuadratureRule gauss_rule(int n);

}  // namespace igamg
