#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdot {

enum class ErrorCode {
  MissingField,
  GeometryInvalid,
  TypeIIUnsupported,
  UnknownMaterial,
  InvalidValue,
  TooFewIntervals,
  MultiplicityOutOfRange,
  IndexOutOfRange,
  PointOutsideDomain,
  DegenerateSpline,
  SeriesNotConverged,
  InconsistentGeometry,
  SolverFailure,
  RootNotBracketed,
  OutsideWell,
  BasisMismatch,
  StateOutOfRange,
  NotNormalized,
  NormDrift,
  TooShort,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure surfaced by the library carries one of the codes above so
// callers (and the CLI exit-code mapping) can branch on the kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qdot
