#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracholder {

enum class ErrorCode {
  InvalidGeometry,
  UnboundedDomain,
  DomainNotContained,
  SpacingMismatch,
  BadGrading,
  TooFewLayers,
  SOutOfRange,
  GridMismatch,
  SolverDiverged,
  MissingExteriorData,
  GNotInComplement,
  UnsupportedFarField,
  AnchorNotOnBoundary,
  RadiusTooLarge,
  LocalDomainEmpty,
  InsufficientSamples,
  DegenerateSamples,
  GeometryViolation,
  PointsOutOfPosition,
  QuadratureFailure,
  InsufficientInteriorRoom,
  ConfigInvalid,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fracholder
