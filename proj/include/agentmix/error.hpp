#pragma once

#include <stdexcept>
#include <string>

namespace agentmix {

enum class ErrorCode {
  NotNormalized,
  NegativeMass,
  DivisionByZero,
  BadRational,
  AlternationViolation,
  SymbolOutOfSpace,
  RewardsNotNegationClosed,
  BadSpaces,
  WrongParity,
  UnknownFamily,
  BadParams,
  NoTailBound,
  NoFiniteHorizon,
  DepthOverflow,
  LengthMismatch,
  InvalidWeights,
  CarrierMismatch,
  NotStronglyWellBehaved,
  NotFiniteHorizon,
  SiteDeterministic,
  SiteUnreachable,
  ParseError,
  SchemaError,
  ValidationError,
  UnknownName,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace agentmix
