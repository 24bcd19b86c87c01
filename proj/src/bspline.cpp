#include "qdot/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qdot/error.hpp"

namespace qdot {

KnotVector::KnotVector(int order, std::vector<double> knots) : order_(order), knots_(std::move(knots)) {
  if (order_ < 1) throw Error(ErrorCode::InvalidValue, "spline order must be >= 1");
  if (num_knots() < 2 * order_) throw Error(ErrorCode::InvalidValue, "too few knots for the order");
  if (!std::is_sorted(knots_.begin(), knots_.end())) {
    throw Error(ErrorCode::InvalidValue, "knot sequence must be nondecreasing");
  }
  if (!(knots_.front() < knots_.back())) throw Error(ErrorCode::InvalidValue, "empty knot range");
  for (double t : knots_) {
    if (breaks_.empty() || t != breaks_.back()) {
      breaks_.push_back(t);
      mults_.push_back(1);
    } else {
      ++mults_.back();
    }
  }
  for (int m : mults_) {
    if (m > order_) throw Error(ErrorCode::MultiplicityOutOfRange, "knot multiplicity exceeds the order");
  }
}

KnotVector KnotVector::from_breakpoints(int order, std::span<const double> breakpoints,
                                        std::span<const int> interior_multiplicity) {
  if (breakpoints.size() < 2 || interior_multiplicity.size() != breakpoints.size() - 2) {
    throw Error(ErrorCode::InvalidValue, "breakpoint/multiplicity size mismatch");
  }
  std::vector<double> t;
  t.insert(t.end(), static_cast<std::size_t>(order), breakpoints.front());
  for (std::size_t j = 1; j + 1 < breakpoints.size(); ++j) {
    const int m = interior_multiplicity[j - 1];
    if (m < 1 || m > order - 1) {
      throw Error(ErrorCode::MultiplicityOutOfRange, "interior multiplicity must be in [1, k-1]");
    }
    t.insert(t.end(), static_cast<std::size_t>(m), breakpoints[j]);
  }
  t.insert(t.end(), static_cast<std::size_t>(order), breakpoints.back());
  return KnotVector(order, std::move(t));
}

KnotVector KnotVector::uniform(int order, double lo, double hi, int intervals) {
  if (intervals < 1) throw Error(ErrorCode::TooFewIntervals, "need at least one interval");
  std::vector<double> bp(static_cast<std::size_t>(intervals) + 1);
  for (int j = 0; j <= intervals; ++j) bp[j] = lo + (hi - lo) * j / intervals;
  bp.back() = hi;
  std::vector<int> mult(static_cast<std::size_t>(intervals) - 1, 1);
  return from_breakpoints(order, bp, mult);
}

int KnotVector::multiplicity_of(double value) const noexcept {
  auto it = std::find(breaks_.begin(), breaks_.end(), value);
  return it == breaks_.end() ? 0 : mults_[static_cast<std::size_t>(it - breaks_.begin())];
}

int KnotVector::span(double r) const {
  if (!(r >= lo() && r <= hi())) {
    throw Error(ErrorCode::PointOutsideDomain, "r = " + std::to_string(r));
  }
  if (r == hi()) {
    auto it = std::lower_bound(knots_.begin(), knots_.end(), hi());
    return static_cast<int>(it - knots_.begin()) - 1;
  }
  auto it = std::upper_bound(knots_.begin(), knots_.end(), r);
  return static_cast<int>(it - knots_.begin()) - 1;
}

int KnotVector::span_at(double r, int side) const {
  if (side == 0) return span(r);
  if (!(r >= lo() && r <= hi())) throw Error(ErrorCode::PointOutsideDomain, "r = " + std::to_string(r));
  if (side < 0) {
    if (r == lo()) return span(r);
    auto it = std::lower_bound(knots_.begin(), knots_.end(), r);
    return static_cast<int>(it - knots_.begin()) - 1;
  }
  if (r == hi()) return span(r);
  auto it = std::upper_bound(knots_.begin(), knots_.end(), r);
  return static_cast<int>(it - knots_.begin()) - 1;
}

std::vector<int> region_intervals(const Device& device, int intervals) {
  std::vector<double> lengths;
  if (device.a > 0.0) lengths.push_back(device.a);
  lengths.push_back(device.b - device.a);
  lengths.push_back(device.R - device.b);
  const int regions = static_cast<int>(lengths.size());
  if (intervals < 7 || intervals < regions) {
    throw Error(ErrorCode::TooFewIntervals, "I = " + std::to_string(intervals) + " (need I >= 7)");
  }
  // Largest-remainder apportionment with at least one subinterval per region.
  std::vector<double> ideal(lengths.size());
  std::vector<int> count(lengths.size());
  int total = 0;
  for (int r = 0; r < regions; ++r) {
    ideal[r] = intervals * lengths[r] / device.R;
    count[r] = std::max(1, static_cast<int>(std::floor(ideal[r])));
    total += count[r];
  }
  while (total < intervals) {
    int best = 0;
    for (int r = 1; r < regions; ++r) {
      if (ideal[r] - count[r] > ideal[best] - count[best]) best = r;
    }
    ++count[best];
    ++total;
  }
  while (total > intervals) {
    int best = -1;
    for (int r = 0; r < regions; ++r) {
      if (count[r] > 1 && (best < 0 || count[r] - ideal[r] > count[best] - ideal[best])) best = r;
    }
    --count[best];
    --total;
  }
  return count;
}

KnotVector build_knots(const Device& device, int order, int intervals, int interface_multiplicity) {
  validate(device);
  if (order < 4) throw Error(ErrorCode::InvalidValue, "build_knots needs k >= 4");
  if (interface_multiplicity < 1 || interface_multiplicity > order - 1) {
    throw Error(ErrorCode::MultiplicityOutOfRange,
                "interface multiplicity " + std::to_string(interface_multiplicity) + " not in [1, k-1]");
  }
  const std::vector<int> count = region_intervals(device, intervals);

  std::vector<double> edges;
  if (device.a > 0.0) edges.push_back(device.a);
  edges.push_back(device.b);
  edges.push_back(device.R);

  std::vector<double> bp{0.0};
  std::vector<int> mult;
  double start = 0.0;
  for (std::size_t r = 0; r < count.size(); ++r) {
    const double end = edges[r];
    for (int j = 1; j < count[r]; ++j) {
      bp.push_back(start + (end - start) * j / count[r]);
      mult.push_back(1);
    }
    bp.push_back(end);
    if (r + 1 < count.size()) mult.push_back(interface_multiplicity);
    start = end;
  }
  return KnotVector::from_breakpoints(order, bp, mult);
}

KnotVector build_knots(const Device& device, int order, int intervals) {
  return build_knots(device, order, intervals, order - 3);
}

namespace {

bool indicator(const KnotVector& kv, int i, double r) {
  const auto& t = kv.knots();
  if (t[i] <= r && r < t[i + 1]) return true;
  // close the last nonempty span on the right
  return r == kv.hi() && t[i] < t[i + 1] && t[i + 1] == kv.hi();
}

double cox_de_boor(const KnotVector& kv, int i, int k, double r) {
  if (k == 1) return indicator(kv, i, r) ? 1.0 : 0.0;
  const auto& t = kv.knots();
  double v = 0.0;
  const double d1 = t[i + k - 1] - t[i];
  if (d1 > 0.0) v += (r - t[i]) / d1 * cox_de_boor(kv, i, k - 1, r);
  const double d2 = t[i + k] - t[i + 1];
  if (d2 > 0.0) v += (t[i + k] - r) / d2 * cox_de_boor(kv, i + 1, k - 1, r);
  return v;
}

}  // namespace

double eval_basis(const KnotVector& kv, int i, double r, int deriv_order) {
  if (i < 0 || i >= kv.num_splines()) throw Error(ErrorCode::IndexOutOfRange, "spline " + std::to_string(i));
  if (!(r >= kv.lo() && r <= kv.hi())) throw Error(ErrorCode::PointOutsideDomain, "r = " + std::to_string(r));
  const int k = kv.order();
  if (deriv_order == 0) return cox_de_boor(kv, i, k, r);
  if (deriv_order != 1) throw Error(ErrorCode::InvalidValue, "only derivative orders 0 and 1");
  if (k == 1) return 0.0;
  const auto& t = kv.knots();
  double v = 0.0;
  const double d1 = t[i + k - 1] - t[i];
  if (d1 > 0.0) v += cox_de_boor(kv, i, k - 1, r) / d1;
  const double d2 = t[i + k] - t[i + 1];
  if (d2 > 0.0) v -= cox_de_boor(kv, i + 1, k - 1, r) / d2;
  return (k - 1) * v;
}

void eval_nonzero(const KnotVector& kv, int mu, double r, std::span<double> values, std::span<double> derivs) {
  const auto& t = kv.knots();
  const int p = kv.order() - 1;
  double left[32], right[32], lower[32];
  values[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = r - t[mu + 1 - j];
    right[j] = t[mu + j] - r;
    double saved = 0.0;
    for (int s = 0; s < j; ++s) {
      const double tmp = values[s] / (right[s + 1] + left[j - s]);
      values[s] = saved + right[s + 1] * tmp;
      saved = left[j - s] * tmp;
    }
    values[j] = saved;
    if (j == p - 1) std::copy(values.begin(), values.begin() + p, lower);
  }
  if (derivs.empty()) return;
  if (p == 0) {
    derivs[0] = 0.0;
    return;
  }
  if (p == 1) lower[0] = 1.0;
  for (int s = 0; s <= p; ++s) {
    const int i = mu - p + s;
    double d = 0.0;
    if (s >= 1) d += lower[s - 1] / (t[i + p] - t[i]);
    if (s <= p - 1) d -= lower[s] / (t[i + p + 1] - t[i + 1]);
    derivs[s] = p * d;
  }
}

QuadratureTable gauss_rule(const KnotVector& kv, int points_per_subinterval) {
  return make_composite_rule(kv.breakpoints(), points_per_subinterval);
}

std::vector<double> normalize(const KnotVector& kv) {
  const int k = kv.order();
  const QuadratureTable q = gauss_rule(kv, k);
  std::vector<double> sq(static_cast<std::size_t>(kv.num_splines()), 0.0);
  std::vector<double> vals(static_cast<std::size_t>(k)), ders(static_cast<std::size_t>(k));
  for (int n = 0; n < q.size(); ++n) {
    const int mu = kv.span(q.nodes[n]);
    eval_nonzero(kv, mu, q.nodes[n], vals, {});
    for (int s = 0; s < k; ++s) sq[mu - k + 1 + s] += q.weights[n] * vals[s] * vals[s];
  }
  std::vector<double> c(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    if (!(sq[i] > 0.0)) throw Error(ErrorCode::DegenerateSpline, "spline " + std::to_string(i) + " has zero norm");
    c[i] = 1.0 / std::sqrt(sq[i]);
  }
  return c;
}

RadialBasis::RadialBasis(KnotVector kv, int points_per_subinterval)
    : kv_(std::move(kv)), quad_(gauss_rule(kv_, points_per_subinterval)) {
  if (points_per_subinterval < kv_.order()) {
    throw Error(ErrorCode::InvalidValue, "need at least k Gauss points per subinterval");
  }
  const std::vector<double> all = normalize(kv_);
  const int nsplines = kv_.num_splines();
  if (nsplines < 3) throw Error(ErrorCode::DegenerateSpline, "basis has no interior splines");
  norm_.assign(all.begin() + 1, all.end() - 1);

  const int k = kv_.order();
  const int n = size();
  values_ = Eigen::MatrixXd::Zero(quad_.size(), n);
  derivs_ = Eigen::MatrixXd::Zero(quad_.size(), n);
  std::vector<double> vals(static_cast<std::size_t>(k)), ders(static_cast<std::size_t>(k));
  for (int q = 0; q < quad_.size(); ++q) {
    const int mu = kv_.span(quad_.nodes[q]);
    eval_nonzero(kv_, mu, quad_.nodes[q], vals, ders);
    for (int s = 0; s < k; ++s) {
      const int orb = mu - k + 1 + s - 1;  // spline index -> retained orbital index
      if (orb < 0 || orb >= n) continue;
      values_(q, orb) = norm_[orb] * vals[s];
      derivs_(q, orb) = norm_[orb] * ders[s];
    }
  }
}

void RadialBasis::eval(double r, Eigen::Ref<Eigen::VectorXd> values, Eigen::Ref<Eigen::VectorXd> derivs,
                       int side) const {
  const int k = kv_.order();
  const int n = size();
  values.setZero();
  derivs.setZero();
  const int mu = kv_.span_at(r, side);
  double vals[32], ders[32];
  eval_nonzero(kv_, mu, r, std::span<double>(vals, k), std::span<double>(ders, k));
  for (int s = 0; s < k; ++s) {
    const int orb = mu - k + 1 + s - 1;
    if (orb < 0 || orb >= n) continue;
    values[orb] = norm_[orb] * vals[s];
    derivs[orb] = norm_[orb] * ders[s];
  }
}

double RadialBasis::function(const Eigen::VectorXd& coeffs, double r, int side) const {
  Eigen::VectorXd v(size()), d(size());
  eval(r, v, d, side);
  return v.dot(coeffs);
}

double RadialBasis::derivative(const Eigen::VectorXd& coeffs, double r, int side) const {
  Eigen::VectorXd v(size()), d(size());
  eval(r, v, d, side);
  return d.dot(coeffs);
}

}  // namespace qdot
