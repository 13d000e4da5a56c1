#include "fracholder/error.hpp"

namespace fracholder {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::UnboundedDomain: return "UnboundedDomain";
    case ErrorCode::DomainNotContained: return "DomainNotContained";
    case ErrorCode::SpacingMismatch: return "SpacingMismatch";
    case ErrorCode::BadGrading: return "BadGrading";
    case ErrorCode::TooFewLayers: return "TooFewLayers";
    case ErrorCode::SOutOfRange: return "SOutOfRange";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::MissingExteriorData: return "MissingExteriorData";
    case ErrorCode::GNotInComplement: return "GNotInComplement";
    case ErrorCode::UnsupportedFarField: return "UnsupportedFarField";
    case ErrorCode::AnchorNotOnBoundary: return "AnchorNotOnBoundary";
    case ErrorCode::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorCode::LocalDomainEmpty: return "LocalDomainEmpty";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DegenerateSamples: return "DegenerateSamples";
    case ErrorCode::GeometryViolation: return "GeometryViolation";
    case ErrorCode::PointsOutOfPosition: return "PointsOutOfPosition";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::InsufficientInteriorRoom: return "InsufficientInteriorRoom";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

}  // namespace fracholder
