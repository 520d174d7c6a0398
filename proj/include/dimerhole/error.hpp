#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dimerhole {

enum class ErrorCode {
  kInfeasibleGeometry,
  kUnbalancedRegion,
  kRegionTooLarge,
  kInvalidEdge,
  kUntileable,
  kInconsistentTiling,
  kMissingHarmonicData,
  kMeshTooCoarse,
  kSolverDiverged,
  kSourceTooCloseToBoundary,
  kMismatchedMeshes,
  kPathLeavesDomain,
  kSingularPeriodMatrix,
  kTruncationInsufficient,
  kNonRealShift,
  kCoincidentPoints,
  kThetaNearZero,
  kPathsIntersect,
  kInsufficientSamples,
  kUnsupportedDomain,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI stage labels) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInfeasibleGeometry: return "InfeasibleGeometry";
    case ErrorCode::kUnbalancedRegion: return "UnbalancedRegion";
    case ErrorCode::kRegionTooLarge: return "RegionTooLarge";
    case ErrorCode::kInvalidEdge: return "InvalidEdge";
    case ErrorCode::kUntileable: return "Untileable";
    case ErrorCode::kInconsistentTiling: return "InconsistentTiling";
    case ErrorCode::kMissingHarmonicData: return "MissingHarmonicData";
    case ErrorCode::kMeshTooCoarse: return "MeshTooCoarse";
    case ErrorCode::kSolverDiverged: return "SolverDiverged";
    case ErrorCode::kSourceTooCloseToBoundary: return "SourceTooCloseToBoundary";
    case ErrorCode::kMismatchedMeshes: return "MismatchedMeshes";
    case ErrorCode::kPathLeavesDomain: return "PathLeavesDomain";
    case ErrorCode::kSingularPeriodMatrix: return "SingularPeriodMatrix";
    case ErrorCode::kTruncationInsufficient: return "TruncationInsufficient";
    case ErrorCode::kNonRealShift: return "NonRealShift";
    case ErrorCode::kCoincidentPoints: return "CoincidentPoints";
    case ErrorCode::kThetaNearZero: return "ThetaNearZero";
    case ErrorCode::kPathsIntersect: return "PathsIntersect";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kUnsupportedDomain: return "UnsupportedDomain";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace dimerhole
