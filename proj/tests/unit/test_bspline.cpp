#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "qdot/bspline.hpp"
#include "qdot/error.hpp"

using namespace qdot;

namespace {

Device paper_device(double a = 15.855, double b = 31.71, double R = 63.42) {
  Device d;
  d.well = builtin_material("HgS");
  d.well.e_gap = 0.5;
  d.barrier = builtin_material("CdS");
  d.a = a;
  d.b = b;
  d.R = R;
  d.v0_e = 1.35;
  d.v0_h = 0.9;
  return d;
}

// Adaptive Gauss-Kronrod over every knot span of the support.
template <class F>
double adaptive(const KnotVector& kv, double lo, double hi, F&& f) {
  double total = 0.0;
  const auto& bp = kv.breakpoints();
  for (std::size_t j = 0; j + 1 < bp.size(); ++j) {
    const double x0 = std::max(lo, bp[j]), x1 = std::min(hi, bp[j + 1]);
    if (x1 <= x0) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, x0, x1, 20, 1e-15);
  }
  return total;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidValue;
}

}  // namespace

TEST_CASE("Gauss-Legendre rule is exact to degree 2n-1") {
  for (int n = 1; n <= 20; ++n) {
    const GaussLegendre gl(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += gl.weights[i] * std::pow(gl.nodes[i], deg);
      const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
      CHECK(std::abs(s - exact) < 1e-14);
    }
  }
}

TEST_CASE("knot count follows the interface scheme") {
  const Device d = paper_device();
  const int k = 5, I = 10;
  const KnotVector kv = build_knots(d, k, I);  // multiplicity k-3 at a and b
  CHECK(kv.num_knots() == I + 2 * k + 2 * (k - 3) - 3);
  CHECK(kv.num_knots() == 21);
  CHECK(kv.num_splines() == 16);
  CHECK(kv.num_splines() - 2 == I + 3 * k - 11);
  CHECK(kv.multiplicity_of(0.0) == k);
  CHECK(kv.multiplicity_of(d.R) == k);
  CHECK(kv.multiplicity_of(d.a) == k - 3);
  CHECK(kv.multiplicity_of(d.b) == k - 3);
  CHECK(static_cast<int>(kv.breakpoints().size()) == I + 1);

  const RadialBasis basis(kv, k + 6);
  CHECK(basis.size() == 14);

  for (int m = 1; m <= k - 1; ++m) {
    const KnotVector km = build_knots(d, k, 24, m);
    CHECK(km.num_knots() == 24 + 2 * k + 2 * m - 3);
  }
}

TEST_CASE("subintervals are apportioned by region length") {
  const Device d = paper_device(15.855, 31.71, 63.42);  // lengths 1:1:2
  CHECK(region_intervals(d, 20) == std::vector<int>{5, 5, 10});
  CHECK(region_intervals(d, 40) == std::vector<int>{10, 10, 20});
  const Device thin = paper_device(0.5, 31.71, 63.42);
  const auto c = region_intervals(thin, 10);
  CHECK(c[0] >= 1);
  CHECK(c[0] + c[1] + c[2] == 10);
  const Device nocore = paper_device(0.0, 31.71, 63.42);
  const KnotVector kv = build_knots(nocore, 5, 10, 4);
  CHECK(kv.num_knots() == 10 + 2 * 5 + 4 - 2);
  CHECK(region_intervals(nocore, 10) == std::vector<int>{5, 5});
}

TEST_CASE("build_knots preconditions") {
  const Device d = paper_device();
  CHECK(code_of([&] { build_knots(d, 5, 6); }) == ErrorCode::TooFewIntervals);
  CHECK(code_of([&] { build_knots(d, 5, 10, 0); }) == ErrorCode::MultiplicityOutOfRange);
  CHECK(code_of([&] { build_knots(d, 5, 10, 5); }) == ErrorCode::MultiplicityOutOfRange);
}

TEST_CASE("order-1 splines are interval indicators") {
  const KnotVector kv(1, {0.0, 0.5, 1.0, 2.0});
  CHECK(eval_basis(kv, 0, 0.0) == 1.0);
  CHECK(eval_basis(kv, 0, 0.49) == 1.0);
  CHECK(eval_basis(kv, 0, 0.5) == 0.0);
  CHECK(eval_basis(kv, 1, 0.5) == 1.0);
  CHECK(eval_basis(kv, 1, 1.5) == 0.0);
  CHECK(eval_basis(kv, 2, 1.5) == 1.0);
  CHECK(eval_basis(kv, 2, 2.0) == 1.0);  // closed on the right end
  CHECK(code_of([&] { eval_basis(kv, 3, 0.1); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([&] { eval_basis(kv, 0, 2.5); }) == ErrorCode::PointOutsideDomain);
}

TEST_CASE("cubic uniform spline at its central knot") {
  // Hand-unrolled recurrence on knots 0,1,2,3,4 at r = 2:
  // order 1: only B_2^(1) (span [2,3)) is 1.
  // order 2: B_1^(2) = (3-2)/(3-2) * 1 = 1 ; B_2^(2) = (2-2)/1 * 1 = 0.
  // order 3: B_0^(3) = (4-... ) -> (r-t0)/(t2-t0)*B_0^(2) + (t3-r)/(t3-t1)*B_1^(2) = 0 + 1/2
  //          B_1^(3) = (r-t1)/(t3-t1)*B_1^(2) + (t4-r)/(t4-t2)*B_2^(2) = 1/2
  // order 4: B_0^(4) = (r-t0)/(t3-t0)*B_0^(3) + (t4-r)/(t4-t1)*B_1^(3) = 2/3*1/2 + 2/3*1/2
  const double oracle = 2.0 / 3.0 * 0.5 + 2.0 / 3.0 * 0.5;
  const KnotVector kv(4, {0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(eval_basis(kv, 0, 2.0) == doctest::Approx(oracle).epsilon(1e-15));
  CHECK(oracle == doctest::Approx(2.0 / 3.0));
  CHECK(eval_basis(kv, 0, 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(eval_basis(kv, 0, 2.0, 1) == doctest::Approx(0.0));
}

TEST_CASE("partition of unity and local support") {
  const Device d = paper_device();
  for (int m = 1; m <= 4; ++m) {
    const KnotVector kv = build_knots(d, 5, 20, m);
    std::mt19937_64 rng(11 + m);
    std::uniform_real_distribution<double> u(0.0, d.R);
    for (int trial = 0; trial < 1000; ++trial) {
      const double r = u(rng);
      double s = 0.0;
      for (int i = 0; i < kv.num_splines(); ++i) {
        const double v = eval_basis(kv, i, r);
        s += v;
        if (r < kv.knots()[i] || r > kv.knots()[i + kv.order()]) CHECK(v == 0.0);
        CHECK(v >= -1e-15);
      }
      CHECK(std::abs(s - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("de Boor evaluator agrees with the Cox-de Boor recurrence") {
  const Device d = paper_device();
  const KnotVector kv = build_knots(d, 5, 20, 3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, d.R);
  std::vector<double> vals(5), ders(5);
  for (int trial = 0; trial < 300; ++trial) {
    const double r = u(rng);
    const int mu = kv.span(r);
    eval_nonzero(kv, mu, r, vals, ders);
    for (int s = 0; s < 5; ++s) {
      CHECK(vals[s] == doctest::Approx(eval_basis(kv, mu - 4 + s, r)).epsilon(1e-12));
      CHECK(ders[s] == doctest::Approx(eval_basis(kv, mu - 4 + s, r, 1)).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("continuity class at the interfaces equals k-1-multiplicity") {
  const Device d = paper_device();
  const int k = 5;
  const double h = 1e-9;
  for (int m = 1; m <= k - 1; ++m) {
    const KnotVector kv = build_knots(d, k, 20, m);
    const int cont = k - 1 - m;
    for (double x : {d.a, d.b}) {
      double max_value_jump = 0.0, max_d1_jump = 0.0, max_d2_jump = 0.0, scale_d1 = 0.0, scale_d2 = 0.0;
      for (int i = 0; i < kv.num_splines(); ++i) {
        const double left = eval_basis(kv, i, x - h), right = eval_basis(kv, i, x + h);
        max_value_jump = std::max(max_value_jump, std::abs(left - right));
        // one-sided difference quotients of the values
        const double dl = (eval_basis(kv, i, x - h) - eval_basis(kv, i, x - 2 * h)) / h;
        const double dr = (eval_basis(kv, i, x + 2 * h) - eval_basis(kv, i, x + h)) / h;
        max_d1_jump = std::max(max_d1_jump, std::abs(dl - dr));
        scale_d1 = std::max(scale_d1, std::abs(dl));
        // second derivative through one-sided quotients of the exact first derivative
        const double hl = 1e-6;
        const double d2l = (eval_basis(kv, i, x - hl, 1) - eval_basis(kv, i, x - 2 * hl, 1)) / hl;
        const double d2r = (eval_basis(kv, i, x + 2 * hl, 1) - eval_basis(kv, i, x + hl, 1)) / hl;
        max_d2_jump = std::max(max_d2_jump, std::abs(d2l - d2r));
        scale_d2 = std::max(scale_d2, std::abs(d2l));
      }
      CHECK(max_value_jump < 1e-6);
      if (cont == 0) {
        CHECK(max_d1_jump > 1e-2 * scale_d1);
      } else {
        CHECK(max_d1_jump < 1e-4 * std::max(1.0, scale_d1));
        if (cont == 1) CHECK(max_d2_jump > 1e-2 * scale_d2);
        else CHECK(max_d2_jump < 1e-3 * std::max(1.0, scale_d2));
      }
    }
  }
}

TEST_CASE("normalisation constants") {
  const KnotVector unit(1, {0.0, 1.0});
  CHECK(normalize(unit)[0] == doctest::Approx(1.0).epsilon(1e-15));

  const Device d = paper_device();
  const KnotVector kv = build_knots(d, 5, 20, 2);
  const std::vector<double> c = normalize(kv);
  const QuadratureTable q = gauss_rule(kv, 11);
  for (int i = 0; i < kv.num_splines(); ++i) {
    const double s = q.integrate([&](double r) {
      const double v = c[i] * eval_basis(kv, i, r);
      return v * v;
    });
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
  // interior spline against an adaptive-quadrature oracle
  const int i = kv.num_splines() / 2;
  const double oracle = adaptive(kv, kv.knots()[i], kv.knots()[i + 5], [&](double r) {
    const double v = eval_basis(kv, i, r);
    return v * v;
  });
  CHECK(std::abs(c[i] - 1.0 / std::sqrt(oracle)) < 1e-10 * c[i]);
}

TEST_CASE("composite Gauss rule") {
  const Device d = paper_device();
  const KnotVector kv = build_knots(d, 5, 20, 2);
  const QuadratureTable q = gauss_rule(kv, 11);
  const double r3 = q.integrate([](double r) { return r * r * r; });
  CHECK(std::abs(r3 / (std::pow(d.R, 4) / 4) - 1.0) < 1e-13);
  for (double x : q.nodes) {
    CHECK(x != d.a);
    CHECK(x != d.b);
    CHECK(x > 0.0);
    CHECK(x < d.R);
  }
  for (int c = 0; c < q.cells(); ++c) {
    for (int j = q.begin(c); j < q.begin(c) + q.points_per_cell; ++j) {
      CHECK(q.nodes[j] > q.edges[c]);
      CHECK(q.nodes[j] < q.edges[c + 1]);
    }
  }
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, kv.num_splines() - 1);
  for (int trial = 0; trial < 20; ++trial) {
    const int i = pick(rng);
    const int j = std::clamp(i + trial % 5 - 2, 0, kv.num_splines() - 1);
    auto f = [&](double r) { return eval_basis(kv, i, r) * eval_basis(kv, j, r); };
    const double lo = std::max(kv.knots()[i], kv.knots()[j]);
    const double hi = std::min(kv.knots()[i + 5], kv.knots()[j + 5]);
    const double oracle = hi > lo ? adaptive(kv, lo, hi, f) : 0.0;
    CHECK(std::abs(q.integrate(f) - oracle) < 1e-12 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("retained orbitals vanish at both ends") {
  const Device d = paper_device();
  const RadialBasis basis(build_knots(d, 5, 20, 4), 11);
  Eigen::VectorXd v(basis.size()), dv(basis.size());
  basis.eval(0.0, v, dv);
  CHECK(v.cwiseAbs().maxCoeff() == 0.0);
  CHECK(dv.cwiseAbs().maxCoeff() > 0.0);
  basis.eval(d.R, v, dv);
  CHECK(v.cwiseAbs().maxCoeff() == 0.0);
  // tabulated values match direct evaluation
  const auto& q = basis.quadrature();
  for (int n = 0; n < q.size(); n += 37) {
    basis.eval(q.nodes[n], v, dv);
    CHECK((basis.values().row(n).transpose() - v).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((basis.derivs().row(n).transpose() - dv).cwiseAbs().maxCoeff() < 1e-12);
  }
}
