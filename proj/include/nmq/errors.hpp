#pragma once

#include <stdexcept>
#include <string>

namespace nmq {

enum class ErrorKind {
  InvalidArgument,
  SectorViolation,
  DimMismatch,
  NotHermitian,
  TimeOutOfRange,
  GapCollapse,
  NegativeFrequency,
  TraceDrift,
  HermiticityDrift,
  NonFiniteValue,
  NegativeExpectation,
  OutOfValidatedRange,
  RootNotFound,
  NonIntegerN,
  ConfigInvalid,
};

const char* to_string(ErrorKind kind) noexcept;

// All library failures are reported through this type; kind() selects the
// CLI exit code and the machine-readable error record in run manifests.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nmq
