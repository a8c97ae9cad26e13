#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace segre {

/// Exact coefficient type used by every current and weight.
using Rational = boost::rational<std::int64_t>;

/// `3`, `-2`, `1/2`.
std::string to_string(const Rational& q);

/// Accepts `n` or `n/d` with an optional leading sign. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

}  // namespace segre
