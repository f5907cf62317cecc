#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace salttex {

/// Machine-readable failure codes. The names are part of the external
/// contract: they appear in CLI messages and HTTP error bodies.
enum class ErrorCode {
  // ingestion / data
  UnsupportedFormatCode,
  TruncatedTrace,
  NonRectangularGrid,
  EmptyFile,
  NonFiniteSample,
  DimMismatch,
  BadSidecar,
  IndexOutOfRange,
  ConstantSection,
  NotNormalized,
  IoError,
  // attributes
  ShapeMismatch,
  SectionTooSmall,
  VolumeTooSmall,
  // segmentation
  DegenerateHistogram,
  SeedAboveThreshold,
  SeedOutOfRange,
  EmptyMask,
  // tracking
  TooFewPatches,
  DegenerateCovariance,
  TooFewTrackedPoints,
  // evaluation
  EmptyBoundary,
  LengthMismatch,
  EmptyInput,
  // generic
  InvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

/// Coarse classification used for CLI exit codes and HTTP statuses.
enum class ErrorClass { Usage, Data, Pipeline };
ErrorClass error_class(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace salttex
