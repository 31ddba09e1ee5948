#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tropbn {

enum class ErrorCode {
  Parse,
  NonPositiveLength,
  DanglingEndpoint,
  DuplicateId,
  Disconnected,
  LeafVertex,
  ResolutionTooCoarse,
  LoopTooShort,
  Precondition,
  NotAChain,
  NotATreeOfCycles,
  NotHyperellipticCycle,
  DegreeTooLarge,
  InsufficientPrivateEdges,
  NotFound,
  Unstable,
  Io,
};

/// Errors caused by an unreadable or malformed graph file.
constexpr bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
    case ErrorCode::Parse:
    case ErrorCode::NonPositiveLength:
    case ErrorCode::DanglingEndpoint:
    case ErrorCode::DuplicateId:
    case ErrorCode::Disconnected:
    case ErrorCode::LeafVertex:
      return true;
    default:
      return false;
  }
}

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::LeafVertex: return "LeafVertex";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::LoopTooShort: return "LoopTooShort";
    case ErrorCode::Precondition: return "PreconditionViolation";
    case ErrorCode::NotAChain: return "NotAChain";
    case ErrorCode::NotATreeOfCycles: return "NotATreeOfCycles";
    case ErrorCode::NotHyperellipticCycle: return "NotHyperellipticCycle";
    case ErrorCode::DegreeTooLarge: return "DegreeTooLarge";
    case ErrorCode::InsufficientPrivateEdges: return "InsufficientPrivateEdges";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tropbn
