#pragma once

#include <stdexcept>
#include <string>

namespace voigraph {

enum class ErrorCode {
  SchemaError,
  CycleError,
  UnknownNode,
  MissingUtility,
  DecisionParentMismatch,
  NotAContext,
  DomainMismatch,
  DomainViolation,
  DomainExplosion,
  IncompletePolicy,
  PolicySpaceTooLarge,
  SearchBudgetExceeded,
  PreconditionViolated,
  LemmaHypothesisFailed,
  NoControlPath,
  InternalAssertion,
};

class VgError : public std::runtime_error {
 public:
  VgError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

  // Exit-code mapping used by the CLI: 2 input, 3 budget, 4 internal.
  int exit_code() const {
    switch (code_) {
      case ErrorCode::DomainExplosion:
      case ErrorCode::PolicySpaceTooLarge:
      case ErrorCode::SearchBudgetExceeded:
        return 3;
      case ErrorCode::LemmaHypothesisFailed:
      case ErrorCode::NoControlPath:
      case ErrorCode::InternalAssertion:
        return 4;
      default:
        return 2;
    }
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw VgError(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace voigraph
