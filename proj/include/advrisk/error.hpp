#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace advrisk {

enum class Errc {
  kNonFiniteCoordinate,
  kNegativeEpsilon,
  kNonUniformGrid,
  kZeroOneHasNoPhi,
  kEtaOutOfRange,
  kEtaAtBoundary,
  kNegativeH,
  kMassMismatch,
  kNegativeMass,
  kInstanceTooLarge,
  kInfeasiblePair,
  kInfeasibleDual,
  kParseError,
  kValidationError,
  kWriteError,
  kInvalidArgument,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), detail_(what) {}

  Errc code() const noexcept { return code_; }
  // The message without the error name prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace advrisk
