#include "sparsecp/error.hpp"

namespace sparsecp {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kInvalidInput: return "InvalidInput";
    case Errc::kInvalidGamma: return "InvalidGamma";
    case Errc::kNonConvergence: return "NonConvergence";
    case Errc::kLabelOutOfRange: return "LabelOutOfRange";
    case Errc::kEmptyCalibration: return "EmptyCalibration";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kInvalidFractions: return "InvalidFractions";
    case Errc::kInsufficientData: return "InsufficientData";
    case Errc::kEmptyRun: return "EmptyRun";
    case Errc::kParseError: return "ParseError";
    case Errc::kInconsistentWidth: return "InconsistentWidth";
    case Errc::kIoError: return "IoError";
  }
  return "Unknown";
}

bool is_validation_error(Errc code) {
  switch (code) {
    case Errc::kInvalidInput:
    case Errc::kInvalidGamma:
    case Errc::kLabelOutOfRange:
    case Errc::kDimensionMismatch:
    case Errc::kInvalidFractions:
    case Errc::kParseError:
    case Errc::kInconsistentWidth:
      return true;
    default:
      return false;
  }
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

}  // namespace sparsecp
