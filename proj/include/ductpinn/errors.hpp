#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ductpinn {

enum class ErrorCode {
  InvalidArgument,
  NegativeDiscriminant,
  NonPositiveRoot,
  SonicSingularity,
  DegenerateDenominator,
  ZeroMeanFlow,
  ZeroC,
  NonFiniteLoss,
  ZeroReference,
  SingularZeta1,
  DegenerateHomogeneous,
  DegenerateBoundarySystem,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativeDiscriminant: return "NegativeDiscriminant";
    case ErrorCode::NonPositiveRoot: return "NonPositiveRoot";
    case ErrorCode::SonicSingularity: return "SonicSingularity";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::ZeroMeanFlow: return "ZeroMeanFlow";
    case ErrorCode::ZeroC: return "ZeroC";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::SingularZeta1: return "SingularZeta1";
    case ErrorCode::DegenerateHomogeneous: return "DegenerateHomogeneous";
    case ErrorCode::DegenerateBoundarySystem: return "DegenerateBoundarySystem";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ductpinn
