#include "qdot/error.hpp"

namespace qdot {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::GeometryInvalid: return "GeometryInvalid";
    case ErrorCode::TypeIIUnsupported: return "TypeIIUnsupported";
    case ErrorCode::UnknownMaterial: return "UnknownMaterial";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::TooFewIntervals: return "TooFewIntervals";
    case ErrorCode::MultiplicityOutOfRange: return "MultiplicityOutOfRange";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorCode::DegenerateSpline: return "DegenerateSpline";
    case ErrorCode::SeriesNotConverged: return "SeriesNotConverged";
    case ErrorCode::InconsistentGeometry: return "InconsistentGeometry";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::RootNotBracketed: return "RootNotBracketed";
    case ErrorCode::OutsideWell: return "OutsideWell";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::StateOutOfRange: return "StateOutOfRange";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NormDrift: return "NormDrift";
    case ErrorCode::TooShort: return "TooShort";
  }
  return "Unknown";
}

}  // namespace qdot
