#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace segre {

enum class ErrorKind {
  MalformedTerm,
  ImproperIntersection,
  DegenerateSigma,
  PreconditionViolated,
  NotSmoothAlpha,
  BadSpec,
  UnsupportedPushforward,
  MultipleSigmaFamilies,
  BudgetExceeded,
  NonHermitianHessian,
  NoConvergence,
  ParseError,
  UndeclaredSymbol,
  RankMismatch,
};

std::string_view to_string(ErrorKind kind);

/// Every engine failure carries the name of the rule that refused the input.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace segre
