#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "facthappy/error.hpp"

namespace facthappy {

/// Arbitrary-precision integer. Used unsigned throughout except for the
/// signed tail offset of a descent bound.
using Natural = boost::multiprecision::cpp_int;

inline std::optional<std::uint64_t> to_u64(const Natural& n) {
  if (n < 0 || n > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  return n.convert_to<std::uint64_t>();
}

inline std::string to_string(const Natural& n) { return n.str(); }

/// Parses a plain decimal nonnegative integer ("0", "2020"). No sign, no
/// whitespace, no exponent notation.
inline Natural parse_natural(std::string_view text) {
  if (text.empty()) throw ParseError("empty number");
  Natural value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw ParseError("not a decimal natural number: '" + std::string(text) + "'");
    value *= 10;
    value += c - '0';
  }
  return value;
}

inline Natural factorial(unsigned k) {
  Natural f = 1;
  for (unsigned i = 2; i <= k; ++i) f *= i;
  return f;
}

inline Natural power(const Natural& base, unsigned exponent) {
  return boost::multiprecision::pow(base, exponent);
}

}  // namespace facthappy
