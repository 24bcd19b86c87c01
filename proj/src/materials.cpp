#include "qdot/materials.hpp"

#include <cmath>

#include "qdot/error.hpp"

namespace qdot {

std::string_view to_string(Particle p) noexcept {
  return p == Particle::Electron ? "electron" : "hole";
}

void validate(const Material& m) {
  if (!(m.m_e > 0.0) || !(m.m_h > 0.0)) {
    throw Error(ErrorCode::InvalidValue, "material '" + m.name + "': effective masses must be positive");
  }
  if (!(m.eps >= 1.0)) {
    throw Error(ErrorCode::InvalidValue, "material '" + m.name + "': relative permittivity must be >= 1");
  }
  if (m.e_gap && !(*m.e_gap > 0.0)) {
    throw Error(ErrorCode::InvalidValue, "material '" + m.name + "': band gap must be positive");
  }
}

Material builtin_material(std::string_view name) {
  if (name == "CdS") return Material{"CdS", 0.2, 0.7, 5.5, std::nullopt};
  if (name == "HgS") return Material{"HgS", 0.036, 0.040, 11.36, std::nullopt};
  throw Error(ErrorCode::UnknownMaterial, std::string(name));
}

Region Device::region(double r) const noexcept {
  if (r < a) return Region::Core;
  if (r < b) return Region::Well;
  return Region::Clad;
}

double Device::mass(Particle p, Region reg) const noexcept {
  return reg == Region::Well ? well.mass(p) : barrier.mass(p);
}

Device Device::with_radii(double a_new, double b_new, double R_new) const {
  Device d = *this;
  d.a = a_new;
  d.b = b_new;
  d.R = R_new;
  validate(d);
  return d;
}

Device Device::without_dielectric_mismatch() const {
  Device d = *this;
  d.barrier.eps = d.well.eps;
  return d;
}

void validate(const Device& d) {
  validate(d.barrier);
  validate(d.well);
  if (!(d.a >= 0.0 && d.a < d.b && d.b < d.R) || !std::isfinite(d.R)) {
    throw Error(ErrorCode::GeometryInvalid, "need 0 <= a < b < R, got a=" + std::to_string(d.a) +
                                                " b=" + std::to_string(d.b) + " R=" + std::to_string(d.R));
  }
  if (!(d.v0_e > 0.0) || !(d.v0_h > 0.0)) {
    throw Error(ErrorCode::TypeIIUnsupported, "both band offsets must be positive (Type-I alignment)");
  }
}

bool operator==(const Material& x, const Material& y) {
  return x.name == y.name && x.m_e == y.m_e && x.m_h == y.m_h && x.eps == y.eps && x.e_gap == y.e_gap;
}

bool operator==(const Device& x, const Device& y) {
  return x.barrier == y.barrier && x.well == y.well && x.a == y.a && x.b == y.b && x.R == y.R &&
         x.v0_e == y.v0_e && x.v0_h == y.v0_h;
}

}  // namespace qdot
