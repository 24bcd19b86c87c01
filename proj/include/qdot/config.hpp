#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "qdot/materials.hpp"

namespace qdot {

/// Discretisation and truncation parameters.
struct Numerics {
  int order = 5;                    ///< B-spline order k
  int intervals = 120;              ///< total subintervals I over [0, R]
  int interface_multiplicity = -1;  ///< knot repetition at a and b; -1 -> k-1
  int quad_points = -1;             ///< Gauss points per subinterval; -1 -> k+6
  int n_max = 8;                    ///< radial states per particle per channel in CI
  int l_max = 3;                    ///< highest pair angular momentum in CI
  int selfpol_lmax = 80;
  bool include_selfpol = true;
  bool printed_exponents = false;   ///< ImageForm::Printed instead of Corrected

  int multiplicity() const noexcept { return interface_multiplicity < 0 ? order - 1 : interface_multiplicity; }
  int points() const noexcept { return quad_points < 0 ? order + 6 : quad_points; }
};

/// External sinusoidal drive E(t) = E0 sin(omega t).
struct DriveConfig {
  double E0 = 1e-3;          ///< V/nm (eV per e nm)
  double omega_rel = 1.0;    ///< omega / omega_res
  int periods = 50;          ///< leakage averaging window, in drive periods
  int steps_per_period = 400;
  int n_states = 30;         ///< bound exciton states kept besides the vacuum
  double mu_bulk = 1.0;      ///< e nm
  double transient = 0.0;    ///< fs discarded before averaging
};

struct Config {
  Device device;
  Numerics numerics;
  DriveConfig drive;
};

// The configuration document is INI-style:
//
//   [device]            a, b, R (nm); V0_e, V0_h (eV) or Ec_well, Ec_barrier,
//                       Ev_well, Ev_barrier (eV) from which offsets are derived
//   [material.well]     name, m_e, m_h, eps, E_gap
//   [material.barrier]  name, m_e, m_h, eps
//   [numerics]          order, intervals, interface_multiplicity, quad_points,
//                       n_max, l_max, selfpol_lmax, include_selfpol
//   [drive]             E0, omega_rel, periods, steps_per_period, n_states,
//                       mu_bulk, transient
//
// A material section whose name is a built-in compound may omit its numeric
// fields. E_gap of the well is mandatory.
Config parse_config(std::istream& in);
Config load_config(const std::filesystem::path& path);
Device load_device(std::istream& in);

/// Writes a document parse_config() reads back to an identical Config.
void write_config(std::ostream& out, const Config& cfg);

}  // namespace qdot
