#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace qdot {

enum class Particle { Electron, Hole };

std::string_view to_string(Particle p) noexcept;

/// Bulk semiconductor parameters. Masses in m0, gap in eV.
struct Material {
  std::string name;
  double m_e = 0.0;
  double m_h = 0.0;
  double eps = 1.0;
  std::optional<double> e_gap;  ///< only the well gap is ever consumed

  double mass(Particle p) const noexcept { return p == Particle::Electron ? m_e : m_h; }
};

/// Throws Error(InvalidValue) when a mass, permittivity or gap is out of range.
void validate(const Material& m);

/// Parameter sets for the two compounds of the CdS/HgS/CdS dot. The gap is
/// left unset: it has to come from the user configuration.
Material builtin_material(std::string_view name);

enum class Region { Core, Well, Clad };

/// Spherical core/well/clad heterostructure inside a computation box of
/// radius R. The core and the clad share one material. Type-I only.
struct Device {
  Material barrier;  ///< core and clad compound (permittivity eps2)
  Material well;     ///< middle layer compound (permittivity eps1)
  double a = 0.0;    ///< core radius, nm (0 means no core)
  double b = 0.0;    ///< well outer radius, nm
  double R = 0.0;    ///< box radius, nm
  double v0_e = 0.0; ///< conduction band offset, eV
  double v0_h = 0.0; ///< valence band offset, eV

  double eps_well() const noexcept { return well.eps; }
  double eps_barrier() const noexcept { return barrier.eps; }

  /// Region of an open point; points exactly on an interface belong to the
  /// outer side.
  Region region(double r) const noexcept;
  bool in_well(double r) const noexcept { return r > a && r < b; }

  double mass(Particle p, Region reg) const noexcept;
  double offset(Particle p) const noexcept { return p == Particle::Electron ? v0_e : v0_h; }
  double potential(Particle p, Region reg) const noexcept {
    return reg == Region::Well ? 0.0 : offset(p);
  }

  /// Same materials and offsets, new radii (validated).
  Device with_radii(double a_new, double b_new, double R_new) const;
  /// Copy with the barrier permittivity set equal to the well one, which
  /// removes every dielectric-mismatch (image charge) contribution.
  Device without_dielectric_mismatch() const;
};

/// Throws GeometryInvalid unless 0 <= a < b < R, TypeIIUnsupported unless both
/// offsets are positive, InvalidValue for bad materials.
void validate(const Device& d);

bool operator==(const Material& x, const Material& y);
bool operator==(const Device& x, const Device& y);

}  // namespace qdot
