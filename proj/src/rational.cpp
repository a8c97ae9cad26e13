#include "segre/rational.hpp"

#include <charconv>
#include <stdexcept>

#include "segre/errors.hpp"

namespace segre {

std::string to_string(const Rational& q) {
  std::string out = std::to_string(q.numerator());
  if (q.denominator() != 1) {
    out += '/';
    out += std::to_string(q.denominator());
  }
  return out;
}

namespace {

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    return Rational(parse_int(text));
  }
  const auto den = parse_int(text.substr(slash + 1));
  if (den == 0) {
    throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  }
  return Rational(parse_int(text.substr(0, slash)), den);
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedTerm: return "MalformedTerm";
    case ErrorKind::ImproperIntersection: return "ImproperIntersection";
    case ErrorKind::DegenerateSigma: return "DegenerateSigma";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::NotSmoothAlpha: return "NotSmoothAlpha";
    case ErrorKind::BadSpec: return "BadSpec";
    case ErrorKind::UnsupportedPushforward: return "UnsupportedPushforward";
    case ErrorKind::MultipleSigmaFamilies: return "MultipleSigmaFamilies";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NonHermitianHessian: return "NonHermitianHessian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UndeclaredSymbol: return "UndeclaredSymbol";
    case ErrorKind::RankMismatch: return "RankMismatch";
  }
  return "Unknown";
}

}  // namespace segre
