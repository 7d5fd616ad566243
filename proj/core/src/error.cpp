#include "hyperdp/error.hpp"

namespace hyperdp {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::DuplicateVertex: return "DuplicateVertex";
    case ErrorCode::NotDecomposable: return "NotDecomposable";
    case ErrorCode::NotConnected: return "NotConnected";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::IncompatibleDomains: return "IncompatibleDomains";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::ZeroConditional: return "ZeroConditional";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::InvalidPartition: return "InvalidPartition";
    case ErrorCode::RefinementViolated: return "RefinementViolated";
    case ErrorCode::NotMarkov: return "NotMarkov";
    case ErrorCode::ObservationViolatesSupport: return "ObservationViolatesSupport";
    case ErrorCode::ConditionViolated: return "ConditionViolated";
    case ErrorCode::ZeroReweightedMass: return "ZeroReweightedMass";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace hyperdp
