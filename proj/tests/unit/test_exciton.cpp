#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "grid_exciton.hpp"
#include "qdot/exciton.hpp"
#include "qdot/quadrature.hpp"
#include "qdot/units.hpp"

using namespace qdot;
using fixture::cds_hgs;
using fixture::code_of;

namespace {

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

double legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return p0;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

std::complex<double> Ylm(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  std::complex<double> y = std::sph_legendre(l, am, theta) * std::polar(1.0, am * phi);
  if (m < 0) y = (am % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
  return y;
}

// |(l l) L=0> built from explicit Clebsch-Gordan sums
std::complex<double> coupled(int l, double t1, double p1, double t2, double p2) {
  std::complex<double> s = 0.0;
  for (int m = -l; m <= l; ++m) s += ((l - m) % 2 == 0 ? 1.0 : -1.0) * Ylm(l, m, t1, p1) * Ylm(l, -m, t2, p2);
  return s / std::sqrt(2.0 * l + 1.0);
}

// <(l'l')0| P_lambda(cos gamma) |(l l)0> by product quadrature over both directions
double brute_angular(int lb, int lk, int lambda) {
  const GaussLegendre gl(12);
  const int nphi = 24;
  struct Dir {
    double theta, phi, w, x, y, z;
  };
  std::vector<Dir> dirs;
  for (int i = 0; i < gl.size(); ++i) {
    for (int j = 0; j < nphi; ++j) {
      const double th = std::acos(gl.nodes[i]), ph = 2 * std::numbers::pi * j / nphi;
      dirs.push_back({th, ph, gl.weights[i] * 2 * std::numbers::pi / nphi, std::sin(th) * std::cos(ph),
                      std::sin(th) * std::sin(ph), std::cos(th)});
    }
  }
  std::complex<double> s = 0.0;
  for (const Dir& a : dirs) {
    for (const Dir& b : dirs) {
      const double cg = a.x * b.x + a.y * b.y + a.z * b.z;
      s += a.w * b.w * std::conj(coupled(lb, a.theta, a.phi, b.theta, b.phi)) * legendre(lambda, cg) *
           coupled(lk, a.theta, a.phi, b.theta, b.phi);
    }
  }
  return s.real();
}

OneParticleSet particles(const Device& d, int l_max, int n_max, bool selfpol = true, int intervals = 120) {
  Numerics num;
  num.intervals = intervals;
  return solve_one_particle(make_basis(d, num), d, l_max, n_max, selfpol, 80);
}

}  // namespace

TEST_CASE("3j symbols with zero projections") {
  CHECK(std::abs(three_j_zero(0, 0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(three_j_zero(1, 1, 0) + 1.0 / std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(three_j_zero(1, 1, 2) - std::sqrt(2.0 / 15.0)) < 1e-15);
  CHECK(std::abs(three_j_zero(2, 2, 2) + std::sqrt(2.0 / 35.0)) < 1e-15);
  CHECK(three_j_zero(1, 1, 1) == 0.0);
  CHECK(three_j_zero(1, 1, 3) == 0.0);
}

TEST_CASE("angular coefficients") {
  CHECK(angular_coefficient(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(angular_coefficient(0, 0, 1) == 0.0);
  CHECK(angular_coefficient(2, 1, 0) == 0.0);
  CHECK(std::abs(angular_coefficient(1, 1, 2) - brute_angular(1, 1, 2)) < 1e-8);
  for (int lb = 0; lb <= 2; ++lb)
    for (int lk = 0; lk <= 2; ++lk)
      for (int lam = 0; lam <= 4; ++lam) {
        CAPTURE(lb);
        CAPTURE(lk);
        CAPTURE(lam);
        CHECK(std::abs(angular_coefficient(lb, lk, lam) - brute_angular(lb, lk, lam)) < 1e-8);
        CHECK(angular_coefficient(lb, lk, lam) == angular_coefficient(lk, lb, lam));
      }
  CHECK(code_of([] { angular_coefficient(-1, 0, 0); }) == ErrorCode::InvalidValue);
}

TEST_CASE("radial kernel") {
  const Device d = cds_hgs();
  SUBCASE("bare multipoles without a dielectric step") {
    const Device flat = d.without_dielectric_mismatch();
    for (int l : {0, 1, 3}) {
      const double r1 = 18.0, r2 = 27.0;
      const double bare = 4 * std::numbers::pi * units::coulomb_k / (11.36 * (2 * l + 1)) * std::pow(r1, l) /
                          std::pow(r2, l + 1);
      CHECK(rel(kernel_radial(flat, l, r1, r2), bare) < 1e-14);
    }
  }
  SUBCASE("symmetric") {
    for (int l : {0, 2, 5}) CHECK(kernel_radial(d, l, 17.0, 30.0) == kernel_radial(d, l, 30.0, 17.0));
  }
  SUBCASE("defined in the well only") {
    CHECK(code_of([&] { kernel_radial(d, 0, 10.0, 20.0); }) == ErrorCode::OutsideWell);
    CHECK(code_of([&] { kernel_radial(d, 0, 20.0, 40.0); }) == ErrorCode::OutsideWell);
  }
  SUBCASE("multipole sum reproduces 1/|r1 - r2|") {
    const Device flat = d.without_dielectric_mismatch();
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> rad(d.a, d.b), u(-1.0, 1.0), ang(0.0, 2 * std::numbers::pi);
    for (int trial = 0; trial < 20; ++trial) {
      const double r1 = rad(rng), r2 = rad(rng);
      const double c1 = u(rng), c2 = u(rng), f1 = ang(rng), f2 = ang(rng);
      const double s1 = std::sqrt(1 - c1 * c1), s2 = std::sqrt(1 - c2 * c2);
      const double cosg = s1 * s2 * std::cos(f1 - f2) + c1 * c2;
      const double dist = std::sqrt(r1 * r1 + r2 * r2 - 2 * r1 * r2 * cosg);
      const double direct = units::coulomb_k / (11.36 * dist);
      const double t = std::min(r1, r2) / std::max(r1, r2);
      const int lmax = std::max(40, static_cast<int>(std::ceil(std::log(1e-12) / std::log(t))));
      double sum = 0.0;
      for (int l = 0; l <= lmax; ++l) sum += kernel_radial(flat, l, r1, r2) * (2 * l + 1) / (4 * std::numbers::pi) * legendre(l, cosg);
      CHECK(rel(sum, direct) < 1e-6);
    }
  }
}

TEST_CASE("layered multipole kernel") {
  const Device d = cds_hgs();
  const double e1 = d.eps_well(), e2 = d.eps_barrier(), k = units::coulomb_k;
  SUBCASE("matches the image form inside the well") {
    for (int l = 0; l <= 6; ++l) {
      const MultipoleKernel K(d, l);
      for (double r1 : {16.5, 22.0, 31.0})
        for (double r2 : {16.0, 25.0, 31.5})
          CHECK(rel(K(r1, r2) * 4 * std::numbers::pi / (2 * l + 1), kernel_radial(d, l, r1, r2)) < 1e-12);
    }
  }
  SUBCASE("value and eps times slope are continuous at both interfaces") {
    for (int l = 0; l <= 4; ++l) {
      const MultipoleKernel K(d, l);
      for (double x : {d.a, d.b}) {
        const double h = 1e-6 * x;
        for (auto f : {&MultipoleKernel::inner, &MultipoleKernel::outer}) {
          const double lo = (K.*f)(x - h), hi = (K.*f)(x + h), at = (K.*f)(x);
          CHECK(std::abs(lo - hi) < 1e-4 * std::abs(at));
          const double eps_lo = d.eps_well() * (x == d.b) + d.eps_barrier() * (x == d.a);
          const double eps_hi = d.eps_well() * (x == d.a) + d.eps_barrier() * (x == d.b);
          const double slope_lo = ((K.*f)(x - h) - (K.*f)(x - 2 * h)) / h;
          const double slope_hi = ((K.*f)(x + 2 * h) - (K.*f)(x + h)) / h;
          CHECK(std::abs(eps_lo * slope_lo - eps_hi * slope_hi) < 1e-4 * (std::abs(eps_lo * slope_lo) + 1e-30));
        }
      }
    }
  }
  SUBCASE("two charges outside a dielectric sphere") {
    // textbook image series for a sphere eps1 of radius b inside eps2
    const Device sphere = d.with_radii(0.0, d.b, d.R);
    for (int l = 0; l <= 4; ++l) {
      const MultipoleKernel K(sphere, l);
      const double r1 = 35.0, r2 = 50.0;
      const double image = (e2 - e1) * l / (e1 * l + e2 * (l + 1)) * std::pow(d.b, 2 * l + 1) / std::pow(r1 * r2, l + 1);
      const double expected = k / e2 * (std::pow(r1, l) / std::pow(r2, l + 1) + image);
      CHECK(rel(K(r1, r2), expected) < 1e-12);
    }
  }
  SUBCASE("monopole against the shell-charge integral") {
    const MultipoleKernel K(d, 0);
    for (double r1 : {3.0, 15.0, 20.0, 33.0})
      for (double r2 : {5.0, 25.0, 40.0, 60.0}) CHECK(rel(K(r1, r2), oracle::monopole_kernel(d, std::max(r1, r2))) < 1e-12);
  }
  SUBCASE("regular at the origin, decaying outside") {
    for (int l = 1; l <= 4; ++l) {
      const MultipoleKernel K(d, l);
      CHECK(std::abs(K.inner(1e-3)) < 1e-2);
      CHECK(K.outer(60.0) < K.outer(40.0));
    }
  }
}

TEST_CASE("pair integrals") {
  const Device d = cds_hgs();
  const OneParticleSet p = particles(d, 1, 2, false, 40);
  const auto basis = p.electron[0].basis;
  const Eigen::VectorXd e0 = p.electron[0].coefficients.col(0), e1 = p.electron[0].coefficients.col(1);
  const Eigen::VectorXd h0 = p.hole[0].coefficients.col(0), h1 = p.hole[1].coefficients.col(1);
  for (int lam : {0, 1, 2}) {
    const MultipoleKernel K(d, lam);
    const PairIntegrator pi(basis, K);
    SUBCASE("swapping the two densities") {
      CHECK(rel(pi.integral(e0, e1, h0, h1), pi.integral(h0, h1, e0, e1)) < 1e-12);
    }
    SUBCASE("adaptive double integral") {
      using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
      const auto& bp = basis->knots().breakpoints();
      auto integrate = [&](auto&& f, double lo, double hi) {
        double s = 0.0;
        for (std::size_t j = 0; j + 1 < bp.size(); ++j) {
          const double x0 = std::max(lo, bp[j]), x1 = std::min(hi, bp[j + 1]);
          if (x1 > x0) s += GK::integrate(f, x0, x1, 8, 1e-13);
        }
        return s;
      };
      auto rho2 = [&](double r) { return basis->function(h0, r) * basis->function(h1, r); };
      auto W = [&](double r1) {
        const double below = integrate([&](double r) { return K.inner(r) * rho2(r); }, 0.0, r1);
        const double above = integrate([&](double r) { return K.outer(r) * rho2(r); }, r1, d.R);
        return K.prefactor() * (K.outer(r1) * below + K.inner(r1) * above);
      };
      const double ref = integrate([&](double r) { return basis->function(e0, r) * basis->function(e1, r) * W(r); }, 0.0, d.R);
      CHECK(rel(pi.integral(e0, e1, h0, h1), ref) < 1e-8);
    }
  }
}

TEST_CASE("CI assembly") {
  const Device d = cds_hgs();
  const OneParticleSet p = particles(d, 2, 4);
  CiOptions opt;
  opt.l_max = 2;
  opt.n_max = 4;

  SUBCASE("basis layout") {
    const ExcitonBasis b = ExcitonBasis::make(2, 4);
    CHECK(b.size() == 3 * 16);
    for (int i = 0; i < b.size(); ++i) CHECK(b.index(b.states[i].n_e, b.states[i].n_h, b.states[i].l) == i);
  }
  SUBCASE("symmetric interaction") {
    const CiMatrices m = ci_assemble(p, d, opt);
    const double scale = m.V.cwiseAbs().maxCoeff();
    CHECK((m.V - m.V.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    // the interaction is attractive on the diagonal
    CHECK(m.V.diagonal().maxCoeff() < 0.0);
  }
  SUBCASE("zero interaction gives one-particle sums") {
    opt.interaction_scale = 0.0;
    const CiMatrices m = ci_assemble(p, d, opt);
    const ExcitonSolution s = ci_solve(m, p);
    std::vector<double> sums;
    for (const PairState& st : m.basis.states) sums.push_back(p.electron[st.l].energies[st.n_e] + p.hole[st.l].energies[st.n_h]);
    std::sort(sums.begin(), sums.end());
    for (int i = 0; i < s.size(); ++i) CHECK(std::abs(s.energies[i] - sums[i]) < 1e-14);
    for (int i = 0; i < 5; ++i) CHECK(binding_energy(s, i) == 0.0);
  }
  SUBCASE("single configuration equals first-order theory") {
    opt.l_max = 0;
    opt.n_max = 1;
    const ExcitonSolution s = ci_solve(ci_assemble(p, d, opt), p);
    const double pt = perturbative_binding(p, d);
    CHECK(rel(binding_energy(s, 0), pt) < 1e-13);
    CHECK(rel(s.energies[0], p.electron[0].energies[0] + p.hole[0].energies[0] - pt) < 1e-13);
  }
  SUBCASE("correlation deepens the binding") {
    const ExcitonSolution s = ci_solve(ci_assemble(p, d, opt), p);
    CHECK(binding_energy(s, 0) > perturbative_binding(p, d));
    const Eigen::MatrixXd G = s.coefficients.transpose() * s.coefficients;
    CHECK((G - Eigen::MatrixXd::Identity(s.size(), s.size())).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("errors") {
    opt.n_max = 5;
    CHECK(code_of([&] { ci_assemble(p, d, opt); }) == ErrorCode::BasisMismatch);
    opt.n_max = 2;
    opt.l_max = 3;
    CHECK(code_of([&] { ci_assemble(p, d, opt); }) == ErrorCode::BasisMismatch);
    OneParticleSet mixed = p;
    mixed.hole[1] = particles(d, 1, 4, true, 60).hole[1];
    opt.l_max = 2;
    CHECK(code_of([&] { ci_assemble(mixed, d, opt); }) == ErrorCode::BasisMismatch);
    const ExcitonSolution s = ci_solve(ci_assemble(p, d, opt), p);
    CHECK(code_of([&] { binding_energy(s, s.size()); }) == ErrorCode::StateOutOfRange);
  }
}

TEST_CASE("ground energy does not rise with the CI basis") {
  const Device d = cds_hgs();
  const OneParticleSet p = particles(d, 3, 6);
  double prev = 1e300;
  for (int L = 0; L <= 3; ++L) {
    for (int n : {1, 3, 6}) {
      CiOptions o;
      o.l_max = L;
      o.n_max = n;
      const ExcitonSolution s = ci_solve(ci_assemble(p, d, o), p);
      CHECK(s.energies[0] <= prev + 1e-15);
      prev = s.energies[0];
    }
    prev = 1e300;
  }
  for (int n : {1, 3, 6}) {
    double last = 1e300;
    for (int L = 0; L <= 3; ++L) {
      CiOptions o;
      o.l_max = L;
      o.n_max = n;
      const double e = ci_solve(ci_assemble(p, d, o), p).energies[0];
      CHECK(e <= last + 1e-15);
      last = e;
    }
  }
}

TEST_CASE("multipoles beyond 2 l_max carry no weight") {
  for (int lb = 0; lb <= 3; ++lb)
    for (int lk = 0; lk <= 3; ++lk)
      for (int lam = lb + lk + 1; lam <= 2 * (lb + lk + 1); ++lam) CHECK(angular_coefficient(lb, lk, lam) == 0.0);
}

TEST_CASE("polarisation strengthens every state") {
  const Device d = cds_hgs();
  const Device flat = d.without_dielectric_mismatch();
  Numerics num;
  num.n_max = 4;
  num.l_max = 2;
  const ExcitonSolution with = solve_exciton(d, num);
  const ExcitonSolution without = solve_exciton(flat, num);
  for (int i = 0; i < 6; ++i) CHECK(binding_energy(with, i) > binding_energy(without, i));
}

TEST_CASE("s-wave ground state against a product grid") {
  Device d = cds_hgs(0.5);
  d.R = 2.5 * d.a;  // interfaces on grid nodes; the clad still holds many decay lengths
  Numerics num;
  num.l_max = 0;
  num.n_max = 8;
  num.include_selfpol = false;
  const ExcitonSolution s = solve_exciton(d, num);
  const double shift = s.energies[0] - 2e-3;
  const oracle::GridGround coarse = oracle::grid_ground(d, 200, shift);
  const oracle::GridGround fine = oracle::grid_ground(d, 400, shift);
  // second-order scheme: one Richardson step
  const double E = (4 * fine.energy - coarse.energy) / 3;
  const double B = (4 * fine.binding - coarse.binding) / 3;
  CHECK(rel(s.energies[0], E) < 1e-3);
  CHECK(rel(binding_energy(s, 0), B) < 2e-3);
}

TEST_CASE("the ground state is the most strongly bound") {
  for (double ab : {0.3, 0.5, 0.7}) {
    const ExcitonSolution s = solve_exciton(cds_hgs(ab), Numerics{});
    const double b0 = binding_energy(s, 0);
    for (int i = 1; i < 12; ++i) CHECK(binding_energy(s, i) < b0);
  }
}
