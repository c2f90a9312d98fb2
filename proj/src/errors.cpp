#include "nmq/errors.hpp"

namespace nmq {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SectorViolation: return "SectorViolation";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::TimeOutOfRange: return "TimeOutOfRange";
    case ErrorKind::GapCollapse: return "GapCollapse";
    case ErrorKind::NegativeFrequency: return "NegativeFrequency";
    case ErrorKind::TraceDrift: return "TraceDrift";
    case ErrorKind::HermiticityDrift: return "HermiticityDrift";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::NegativeExpectation: return "NegativeExpectation";
    case ErrorKind::OutOfValidatedRange: return "OutOfValidatedRange";
    case ErrorKind::RootNotFound: return "RootNotFound";
    case ErrorKind::NonIntegerN: return "NonIntegerN";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace nmq
