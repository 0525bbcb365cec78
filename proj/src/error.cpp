#include "advrisk/error.hpp"

namespace advrisk {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kNonFiniteCoordinate: return "NonFiniteCoordinate";
    case Errc::kNegativeEpsilon: return "NegativeEpsilon";
    case Errc::kNonUniformGrid: return "NonUniformGrid";
    case Errc::kZeroOneHasNoPhi: return "ZeroOneHasNoPhi";
    case Errc::kEtaOutOfRange: return "EtaOutOfRange";
    case Errc::kEtaAtBoundary: return "EtaAtBoundary";
    case Errc::kNegativeH: return "NegativeH";
    case Errc::kMassMismatch: return "MassMismatch";
    case Errc::kNegativeMass: return "NegativeMass";
    case Errc::kInstanceTooLarge: return "InstanceTooLarge";
    case Errc::kInfeasiblePair: return "InfeasiblePair";
    case Errc::kInfeasibleDual: return "InfeasibleDual";
    case Errc::kParseError: return "ParseError";
    case Errc::kValidationError: return "ValidationError";
    case Errc::kWriteError: return "WriteError";
    case Errc::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace advrisk
