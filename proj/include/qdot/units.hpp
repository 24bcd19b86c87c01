#pragma once

// Unit system shared by every module: energies in eV, lengths in nm,
// times in fs, masses in units of the free-electron mass m0.
namespace qdot::units {

/// hbar^2 / (2 m0) in eV nm^2.
inline constexpr double hbar2_over_2m0 = 0.0380998;
/// hbar in eV fs.
inline constexpr double hbar = 0.658212;
/// e^2 / (4 pi eps0) in eV nm; divide by the relative permittivity.
inline constexpr double coulomb_k = 1.439964;

}  // namespace qdot::units
