#ifndef HYPERDP_ERROR_HPP
#define HYPERDP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperdp {

/// Symbolic error kinds raised by the library. The CLI reports these by name.
enum class ErrorCode {
  InvalidArgument,
  UnknownVertex,
  DuplicateVertex,
  NotDecomposable,
  NotConnected,
  UnknownVariable,
  IncompatibleDomains,
  SpaceMismatch,
  OutsideDomain,
  ZeroMass,
  ZeroConditional,
  Inconsistent,
  CountMismatch,
  InvalidPartition,
  RefinementViolated,
  NotMarkov,
  ObservationViolatesSupport,
  ConditionViolated,
  ZeroReweightedMass,
  ParseError,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace hyperdp

#endif  // HYPERDP_ERROR_HPP
