#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qdot/materials.hpp"
#include "qdot/quadrature.hpp"

namespace qdot {

/// Nondecreasing knot sequence of a B-spline space of order k (degree k-1).
/// Indices are 0-based: spline i is supported on [t_i, t_{i+k}].
class KnotVector {
 public:
  KnotVector(int order, std::vector<double> knots);

  /// Endpoints repeated k times, interior breakpoints with the given
  /// multiplicities (one entry per interior breakpoint).
  static KnotVector from_breakpoints(int order, std::span<const double> breakpoints,
                                     std::span<const int> interior_multiplicity);
  /// I equal subintervals on [lo, hi] with simple interior knots.
  static KnotVector uniform(int order, double lo, double hi, int intervals);

  int order() const noexcept { return order_; }
  const std::vector<double>& knots() const noexcept { return knots_; }
  int num_knots() const noexcept { return static_cast<int>(knots_.size()); }
  int num_splines() const noexcept { return num_knots() - order_; }
  double lo() const noexcept { return knots_.front(); }
  double hi() const noexcept { return knots_.back(); }

  /// Distinct knot values and their multiplicities.
  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  const std::vector<int>& multiplicities() const noexcept { return mults_; }
  int multiplicity_of(double value) const noexcept;

  /// Knot index mu with t_mu <= r < t_{mu+1}; r == hi() maps to the last
  /// nonempty span so that the space is closed on the right.
  int span(double r) const;
  /// Span whose polynomial piece ends (side < 0) or starts (side > 0) at the
  /// breakpoint r; used for one-sided limits.
  int span_at(double r, int side) const;

 private:
  int order_;
  std::vector<double> knots_;
  std::vector<double> breaks_;
  std::vector<int> mults_;
};

/// Interface-aware knot sequence for a device: k-fold endpoints, a and b
/// repeated `interface_multiplicity` times, and I-3 simple breakpoints spread
/// uniformly inside (0,a), (a,b), (b,R) in proportion to region length. With
/// a = 0 the core region is dropped.
KnotVector build_knots(const Device& device, int order, int intervals, int interface_multiplicity);
KnotVector build_knots(const Device& device, int order, int intervals);

/// Number of subintervals assigned to each region by build_knots.
std::vector<int> region_intervals(const Device& device, int intervals);

/// B_i^{(k)}(r) or its first derivative by the Cox-de Boor recurrence.
double eval_basis(const KnotVector& kv, int i, double r, int deriv_order = 0);

/// Values and first derivatives of the k splines that are nonzero on knot
/// span `mu` (splines mu-k+1 .. mu), evaluated from that span's polynomial
/// piece at r. r may sit on the span's closure, which gives one-sided limits.
void eval_nonzero(const KnotVector& kv, int mu, double r, std::span<double> values, std::span<double> derivs);

/// C_n = (integral of B_{n+1}^2)^{-1/2} for every spline, exact Gauss quadrature.
std::vector<double> normalize(const KnotVector& kv);

/// Per-subinterval Gauss-Legendre rule over the distinct breakpoints.
QuadratureTable gauss_rule(const KnotVector& kv, int points_per_subinterval);

/// Retained orbital set u_n = C_n B_{n+1}, n = 1..N (the first and the last
/// spline are dropped so that u(lo) = u(hi) = 0), tabulated on a composite
/// Gauss rule.
class RadialBasis {
 public:
  RadialBasis(KnotVector kv, int points_per_subinterval);

  const KnotVector& knots() const noexcept { return kv_; }
  const QuadratureTable& quadrature() const noexcept { return quad_; }
  int size() const noexcept { return static_cast<int>(norm_.size()); }
  const std::vector<double>& norm_constants() const noexcept { return norm_; }

  /// values()(q, n) = u_n(x_q); derivs()(q, n) = u_n'(x_q).
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const Eigen::MatrixXd& derivs() const noexcept { return derivs_; }

  /// u_n(r) and u_n'(r) for every retained orbital at an arbitrary point.
  /// side selects the one-sided limit at a breakpoint (-1 left, +1 right, 0 default).
  void eval(double r, Eigen::Ref<Eigen::VectorXd> values, Eigen::Ref<Eigen::VectorXd> derivs, int side = 0) const;

  /// Function sum_n c_n u_n (and derivative) at r.
  double function(const Eigen::VectorXd& coeffs, double r, int side = 0) const;
  double derivative(const Eigen::VectorXd& coeffs, double r, int side = 0) const;

 private:
  KnotVector kv_;
  QuadratureTable quad_;
  std::vector<double> norm_;  // for retained orbitals only
  Eigen::MatrixXd values_;
  Eigen::MatrixXd derivs_;
};

}  // namespace qdot
