#include "salttex/error.hpp"

namespace salttex {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedFormatCode: return "UnsupportedFormatCode";
    case ErrorCode::TruncatedTrace: return "TruncatedTrace";
    case ErrorCode::NonRectangularGrid: return "NonRectangularGrid";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::BadSidecar: return "BadSidecar";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ConstantSection: return "ConstantSection";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SectionTooSmall: return "SectionTooSmall";
    case ErrorCode::VolumeTooSmall: return "VolumeTooSmall";
    case ErrorCode::DegenerateHistogram: return "DegenerateHistogram";
    case ErrorCode::SeedAboveThreshold: return "SeedAboveThreshold";
    case ErrorCode::SeedOutOfRange: return "SeedOutOfRange";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::TooFewPatches: return "TooFewPatches";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::TooFewTrackedPoints: return "TooFewTrackedPoints";
    case ErrorCode::EmptyBoundary: return "EmptyBoundary";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

ErrorClass error_class(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return ErrorClass::Usage;
    case ErrorCode::UnsupportedFormatCode:
    case ErrorCode::TruncatedTrace:
    case ErrorCode::NonRectangularGrid:
    case ErrorCode::EmptyFile:
    case ErrorCode::NonFiniteSample:
    case ErrorCode::DimMismatch:
    case ErrorCode::BadSidecar:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::ConstantSection:
    case ErrorCode::NotNormalized:
    case ErrorCode::IoError:
    case ErrorCode::EmptyBoundary:
    case ErrorCode::LengthMismatch:
    case ErrorCode::EmptyInput:
      return ErrorClass::Data;
    default:
      return ErrorClass::Pipeline;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

}  // namespace salttex
