#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace semwb {

/// Stable, machine-readable error codes. The service layer maps them onto
/// HTTP statuses and the CLI onto exit codes, so the spelling is part of
/// the wire contract.
enum class ErrorCode {
  SyntaxError,
  TypeMismatch,
  IllTyped,
  FuelExhausted,
  InvalidPath,
  FreeReferent,
  UnknownSymbol,
  NotRetrievable,
  UnknownIndex,
  FreeIndexRemaining,
  NoParse,
  UnknownWord,
  IncompatibleParser,
  MissingMacro,
  IllTypedMacro,
  NoRecipe,
  AmbiguousRecipe,
  InvalidParams,
  NotApplicable,
  EmptySentence,
  UnknownSession,
  UnknownNode,
  BadRequest,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::IllTyped: return "IllTyped";
    case ErrorCode::FuelExhausted: return "FuelExhausted";
    case ErrorCode::InvalidPath: return "InvalidPath";
    case ErrorCode::FreeReferent: return "FreeReferent";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::NotRetrievable: return "NotRetrievable";
    case ErrorCode::UnknownIndex: return "UnknownIndex";
    case ErrorCode::FreeIndexRemaining: return "FreeIndexRemaining";
    case ErrorCode::NoParse: return "NoParse";
    case ErrorCode::UnknownWord: return "UnknownWord";
    case ErrorCode::IncompatibleParser: return "IncompatibleParser";
    case ErrorCode::MissingMacro: return "MissingMacro";
    case ErrorCode::IllTypedMacro: return "IllTypedMacro";
    case ErrorCode::NoRecipe: return "NoRecipe";
    case ErrorCode::AmbiguousRecipe: return "AmbiguousRecipe";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::EmptySentence: return "EmptySentence";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::BadRequest: return "BadRequest";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace semwb
