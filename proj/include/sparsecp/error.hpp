#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sparsecp {

enum class Errc {
  kInvalidInput,
  kInvalidGamma,
  kNonConvergence,
  kLabelOutOfRange,
  kEmptyCalibration,
  kDimensionMismatch,
  kInvalidFractions,
  kInsufficientData,
  kEmptyRun,
  kParseError,
  kInconsistentWidth,
  kIoError,
};

std::string_view errc_name(Errc code);

// True for errors caused by malformed input or configuration, as opposed to
// failures while running a well-formed request.
bool is_validation_error(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sparsecp
