#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "qdot/dynamics.hpp"
#include "qdot/simd/kernels.hpp"
#include "qdot/units.hpp"

using namespace qdot;
using fixture::cds_hgs;
using fixture::code_of;

namespace {

const ExcitonSolution& solution() {
  static const ExcitonSolution sol = [] {
    Numerics n;
    n.intervals = 60;
    n.l_max = 2;
    n.n_max = 4;
    return solve_exciton(cds_hgs(0.5), n);
  }();
  return sol;
}

const DrivenSystem& system() {
  static const DrivenSystem s = make_system(dipole_couplings(solution(), cds_hgs(0.5), 1.0, 30), 0.5);
  return s;
}

DrivenSystem two_level(double E, double M) {
  DrivenSystem s;
  s.levels = {E};
  s.couplings = {M};
  return s;
}

}  // namespace

TEST_CASE("pair dipoles") {
  const auto& P = solution().particles;
  SUBCASE("radial overlap against adaptive quadrature") {
    const auto basis = P.electron[0].basis;
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const auto& bp = basis->knots().breakpoints();
    for (int l : {0, 1})
      for (int ne : {0, 1})
        for (int nh : {0, 2}) {
          double ref = 0.0;
          for (std::size_t j = 0; j + 1 < bp.size(); ++j)
            ref += GK::integrate(
                [&](double r) {
                  return basis->function(P.electron[l].coefficients.col(ne), r) *
                         basis->function(P.hole[l].coefficients.col(nh), r);
                },
                bp[j], bp[j + 1], 0, 0.0);
          CHECK(std::abs(pair_dipole(P.electron[l], ne, P.hole[l], nh, 1.0) - ref) < 1e-10);
        }
  }
  SUBCASE("identical states") {
    CHECK(std::abs(pair_dipole(P.electron[0], 0, P.electron[0], 0, 2.5) - 2.5) < 1e-12);
    CHECK(std::abs(pair_dipole(P.hole[1], 2, P.hole[1], 2, 1.0) - 1.0) < 1e-12);
  }
  SUBCASE("different angular momenta") {
    CHECK(pair_dipole(P.electron[0], 0, P.hole[1], 0, 1.0) == 0.0);
  }
  SUBCASE("errors") {
    Numerics n;
    n.intervals = 40;
    const OneParticleSet other = solve_one_particle(make_basis(cds_hgs(0.5), n), cds_hgs(0.5), 0, 2, true, 80);
    CHECK(code_of([&] { pair_dipole(P.electron[0], 0, other.hole[0], 0, 1.0); }) == ErrorCode::BasisMismatch);
    CHECK(code_of([&] { pair_dipole(P.electron[0], 9, P.hole[0], 0, 1.0); }) == ErrorCode::StateOutOfRange);
  }
}

TEST_CASE("dipole couplings") {
  const DipoleTable t = dipole_couplings(solution(), cds_hgs(0.5), 1.0, 30);
  REQUIRE(!t.M.empty());
  CHECK(t.M.size() <= 30u);
  const double bound = std::sqrt(double(solution().basis.size()));
  for (double m : t.M) CHECK(std::abs(m) <= bound);
  const double threshold = ionization_threshold(solution().particles, cds_hgs(0.5));
  for (double e : t.energies) CHECK(e < threshold);
  const DipoleTable t2 = dipole_couplings(solution(), cds_hgs(0.5), 3.0, 5);
  CHECK(t2.M.size() == std::min<std::size_t>(5, t.M.size()));
  for (std::size_t i = 0; i < t2.M.size(); ++i) CHECK(std::abs(t2.M[i] - 3.0 * t.M[i]) < 1e-12);
}

TEST_CASE("resonance frequency") {
  const double w = resonance_frequency(solution(), 0.5);
  CHECK(std::abs(w - (solution().energies[0] + 0.5) / units::hbar) < 1e-15);
  CHECK(resonance_frequency(solution(), 0.6) > w);
  CHECK(code_of([] { resonance_frequency(solution(), 0.0); }) == ErrorCode::InvalidValue);
}

TEST_CASE("free evolution keeps the populations") {
  DriveRun run;
  run.E0 = 0.0;
  run.omega = resonance_frequency(solution(), 0.5);
  run.periods = 5;
  const TimeSeries s = evolve(system(), run);
  CHECK(std::abs(s.U(0, 0) - 1.0) == 0.0);
  for (Eigen::Index k = 0; k < s.U.rows(); ++k) {
    CHECK(std::abs(std::norm(s.U(k, 0)) - 1.0) < 1e-14);
  }
  CHECK(s.U.rightCols(s.U.cols() - 1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two-level Rabi oscillation") {
  const double E = 0.52, M = 2.0, E0 = 1e-3;
  const double omega = E / units::hbar;
  DriveRun run;
  run.E0 = E0;
  run.omega = omega;
  const double rabi_period = 2 * std::numbers::pi * units::hbar / (M * E0);
  run.duration = rabi_period;
  run.store_every = 20;
  const TimeSeries s = evolve(two_level(E, M), run);
  double sq = 0.0;
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    const double ref = std::pow(std::sin(M * E0 * s.t[k] / (2 * units::hbar)), 2);
    sq += std::pow(std::norm(s.U(Eigen::Index(k), 1)) - ref, 2);
  }
  CHECK(std::sqrt(sq / double(s.t.size())) < 0.02);
  CHECK(s.max_norm_error < 1e-8);
  const double t_half = std::numbers::pi * units::hbar / (M * E0);
  CHECK(std::abs(first_transfer_time(s, run) - t_half) < 0.02 * t_half);
  // nothing beyond the first excited level to leak into
  run.periods = int(std::floor(run.duration / run.period()));
  CHECK(std::abs(leakage(s, run).value) < 1e-10);
}

TEST_CASE("integrator accuracy") {
  DriveRun run;
  run.E0 = 1e-2;
  run.omega = resonance_frequency(solution(), 0.5);
  run.periods = 20;
  const TimeSeries coarse = evolve(system(), run);
  CHECK(coarse.max_norm_error < 1e-8);
  run.steps_per_period *= 2;
  const TimeSeries fine = evolve(system(), run);
  REQUIRE(coarse.t.size() * 2 - 1 == fine.t.size());
  const Eigen::Index last_c = coarse.U.rows() - 1, last_f = fine.U.rows() - 1;
  for (Eigen::Index i = 0; i < coarse.U.cols(); ++i)
    CHECK(std::abs(std::norm(coarse.U(last_c, i)) - std::norm(fine.U(last_f, i))) < 1e-8);
}

TEST_CASE("a common energy shift only changes a global phase") {
  DriveRun run;
  run.E0 = 1e-2;
  run.omega = resonance_frequency(solution(), 0.5);
  run.periods = 10;
  DrivenSystem shifted = system();
  shifted.vacuum_energy += 0.37;
  for (double& e : shifted.levels) e += 0.37;
  const TimeSeries a = evolve(system(), run), b = evolve(shifted, run);
  CHECK((a.U.cwiseAbs2() - b.U.cwiseAbs2()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("leakage") {
  DriveRun run;
  run.E0 = 1e-2;
  run.omega = resonance_frequency(solution(), 0.5);
  run.periods = 10;
  SUBCASE("no leakage without couplings beyond the ground exciton") {
    DrivenSystem s = system();
    for (std::size_t i = 1; i < s.couplings.size(); ++i) s.couplings[i] = 0.0;
    CHECK(leakage(evolve(s, run), run).value < 1e-10);
  }
  SUBCASE("two states only") {
    DrivenSystem s = system();
    s.levels.resize(1);
    s.couplings.resize(1);
    CHECK(std::abs(leakage(evolve(s, run), run).value) < 1e-10);
  }
  SUBCASE("series too short") {
    const TimeSeries s = evolve(system(), run);
    DriveRun longer = run;
    longer.periods = 20;
    CHECK(code_of([&] { leakage(s, longer); }) == ErrorCode::TooShort);
    longer.periods = 10;
    longer.transient = run.period();
    CHECK(code_of([&] { leakage(s, longer); }) == ErrorCode::TooShort);
  }
  SUBCASE("a one-point scan is a single run") {
    const auto scan = leakage_scan(system(), {run.E0}, {run.omega}, run);
    REQUIRE(scan.size() == 1u);
    const Leakage L = leakage(evolve(system(), run), run);
    CHECK(scan[0].leakage == L.value);
    CHECK(scan[0].delta == L.delta);
  }
  SUBCASE("scan order") {
    const auto scan = leakage_scan(system(), {1e-3, 2e-3}, {run.omega, 1.1 * run.omega}, run);
    REQUIRE(scan.size() == 4u);
    CHECK(scan[1].E0 == 1e-3);
    CHECK(scan[1].omega == 1.1 * run.omega);
    CHECK(scan[2].E0 == 2e-3);
    CHECK(code_of([&] { leakage_scan(system(), {}, {run.omega}, run); }) == ErrorCode::InvalidValue);
  }
}

TEST_CASE("run validation") {
  DriveRun run;
  run.omega = 1.0;
  run.periods = 2;
  run.steps_per_period = 100;
  CHECK(code_of([&] { evolve(system(), run); }) == ErrorCode::InvalidValue);
  run.steps_per_period = 400;
  run.E0 = -1.0;
  CHECK(code_of([&] { evolve(system(), run); }) == ErrorCode::InvalidValue);
  run.E0 = 50.0;
  run.steps_per_period = 200;
  CHECK(code_of([&] { evolve(system(), run); }) == ErrorCode::NormDrift);
}

TEST_CASE("the ground exciton is pumped hardest at the resonance frequency") {
  const double w_res = resonance_frequency(solution(), 0.5);
  DriveRun base;
  base.E0 = 5e-3;
  base.duration = 1.5 * std::numbers::pi * units::hbar / (std::abs(system().couplings[0]) * base.E0);
  double best = -1.0, best_w = 0.0;
  for (int k = -30; k <= 30; ++k) {
    DriveRun run = base;
    run.omega = w_res * (1.0 + 1e-3 * k);
    const TimeSeries s = evolve(system(), run);
    const double peak = s.probability(1).maxCoeff();
    if (peak > best) {
      best = peak;
      best_w = run.omega;
    }
  }
  CHECK(std::abs(best_w / w_res - 1.0) < 0.01);
}

TEST_CASE("scalar and vector kernels give the same trajectory") {
  if (!simd::cpu_supports(simd::Isa::Avx2) || simd::avx2_kernels() == nullptr) return;
  const simd::Isa saved = simd::active_isa();
  DriveRun run;
  run.E0 = 1e-2;
  run.omega = resonance_frequency(solution(), 0.5);
  run.periods = 10;
  simd::set_isa(simd::Isa::Scalar);
  const TimeSeries a = evolve(system(), run);
  simd::set_isa(simd::Isa::Avx2);
  const TimeSeries b = evolve(system(), run);
  simd::set_isa(saved);
  CHECK((a.U - b.U).cwiseAbs().maxCoeff() < 1e-12);
}
