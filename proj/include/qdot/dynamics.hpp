#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qdot/exciton.hpp"

namespace qdot {

/// mu_bulk * int phi_e phi_h d^3r for electron state n_e and hole state n_h of
/// channels with the same l and opposite m; zero for different l.
double pair_dipole(const RadialSolution& electron, int n_e, const RadialSolution& hole, int n_h, double mu_bulk);

/// Vacuum -> exciton couplings M_i = mu_bulk int Psi_i(r, r) d^3r of the
/// lowest bound exciton states.
struct DipoleTable {
  double mu_bulk = 1.0;          ///< e nm
  std::vector<double> M;         ///< e nm, one per retained state
  std::vector<double> energies;  ///< eV, exciton energies without the gap
};

/// Keeps at most n_states states, and only those below the ionization threshold.
DipoleTable dipole_couplings(const ExcitonSolution& sol, const Device& device, double mu_bulk, int n_states);

/// (E_ground + E_g1) / hbar in rad/fs.
double resonance_frequency(const ExcitonSolution& sol, double e_gap);

/// Levels of the driven problem: index 0 is the vacuum, 1.. the excitons.
struct DrivenSystem {
  double vacuum_energy = 0.0;   ///< eV
  std::vector<double> levels;   ///< eV, exciton energy plus gap
  std::vector<double> couplings;  ///< e nm

  int size() const noexcept { return static_cast<int>(levels.size()) + 1; }
};

DrivenSystem make_system(const DipoleTable& dipoles, double e_gap);

/// Sinusoidal drive E(t) = E0 sin(omega t).
struct DriveRun {
  double E0 = 1e-3;          ///< V/nm
  double omega = 1.0;        ///< rad/fs
  int periods = 50;          ///< leakage averaging window
  int steps_per_period = 400;
  double transient = 0.0;    ///< fs skipped before averaging
  double duration = 0.0;     ///< fs simulated; 0 -> transient + periods * T
  int store_every = 1;       ///< keep every n-th step in the series

  double period() const;
  double dt() const;
  int steps() const;
};

struct TimeSeries {
  std::vector<double> t;  ///< fs
  Eigen::MatrixXcd U;     ///< U(step, level), level 0 the vacuum
  double max_norm_error = 0.0;

  Eigen::VectorXd probability(int level) const { return U.col(level).cwiseAbs2(); }
};

/// Classical RK4 on i hbar dU/dt = H(t) U with
///   H_00 = E_vac, H_ii = E_i, H_0i = H_i0 = -E(t) M_i,
/// starting from the vacuum. The step is taken in the interaction picture,
/// so the free phases are exact and only the drive term is integrated.
/// Throws NormDrift when |U|^2 leaves 1 by more than 1e-6.
TimeSeries evolve(const DrivenSystem& system, const DriveRun& run);

struct Leakage {
  double value = 0.0;
  double delta = 0.0;  ///< |L(n) - L(n/2)|
};

/// (1/nT) int_{t'}^{t'+nT} (1 - |U_0|^2 - |U_1|^2) dt by the trapezoid rule.
/// Throws TooShort when the series ends before t' + nT.
Leakage leakage(const TimeSeries& series, const DriveRun& run);

struct ScanPoint {
  double E0 = 0.0;
  double omega = 0.0;
  double leakage = 0.0;
  double delta = 0.0;
};

/// Leakage over the Cartesian grid, E0 outer and omega inner.
std::vector<ScanPoint> leakage_scan(const DrivenSystem& system, const std::vector<double>& E0,
                                    const std::vector<double>& omega, const DriveRun& base);

/// Time of the first maximum of the period-averaged |U_level|^2 that reaches
/// at least half of its global maximum; negative if none.
double first_transfer_time(const TimeSeries& series, const DriveRun& run, int level = 1);

}  // namespace qdot
