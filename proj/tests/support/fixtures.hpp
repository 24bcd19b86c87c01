#pragma once

#include "qdot/error.hpp"
#include "qdot/materials.hpp"

namespace qdot::fixture {

// CdS/HgS/CdS dot with b = 31.71 nm and the box at 2b.
inline Device cds_hgs(double a_over_b = 0.5, double b = 31.71) {
  Device d;
  d.well = builtin_material("HgS");
  d.well.e_gap = 0.5;
  d.barrier = builtin_material("CdS");
  d.a = a_over_b * b;
  d.b = b;
  d.R = 2.0 * b;
  d.v0_e = 1.35;
  d.v0_h = 0.9;
  return d;
}

template <class F>
ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(-1);
}

}  // namespace qdot::fixture
