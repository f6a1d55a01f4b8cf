#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "facthappy/error.hpp"
#include "facthappy/natural.hpp"

namespace facthappy {

using Digit = std::uint32_t;

/// Factorial-base digits of a nonnegative integer, n = sum a_i * i!.
///
/// Digits are stored little-endian starting at position 1 (the a_0 digit is
/// always zero and is omitted). Zero is the empty list, so a nonempty list
/// always ends in a nonzero digit. Instances are immutable once built.
class FactoradicRep {
 public:
  FactoradicRep() = default;

  /// Validates 0 <= a_i <= i and a nonzero top digit.
  static FactoradicRep from_digits(std::vector<Digit> little_endian) {
    for (std::size_t k = 0; k < little_endian.size(); ++k) {
      if (little_endian[k] > k + 1) {
        throw InvalidRepresentation("digit " + std::to_string(little_endian[k]) + " at position " +
                                    std::to_string(k + 1) + " exceeds bound " + std::to_string(k + 1));
      }
    }
    if (!little_endian.empty() && little_endian.back() == 0) {
      throw InvalidRepresentation("zero top digit at position " + std::to_string(little_endian.size()));
    }
    return FactoradicRep(std::move(little_endian));
  }

  std::span<const Digit> digits() const noexcept { return digits_; }
  std::size_t size() const noexcept { return digits_.size(); }
  bool is_zero() const noexcept { return digits_.empty(); }

  /// Digit at 1-based position i; zero beyond the top.
  Digit digit(std::size_t position) const noexcept {
    return position >= 1 && position <= digits_.size() ? digits_[position - 1] : 0;
  }

  friend bool operator==(const FactoradicRep&, const FactoradicRep&) = default;

 private:
  explicit FactoradicRep(std::vector<Digit> d) : digits_(std::move(d)) {}

  // Trusted construction for operations that maintain the invariants.
  friend FactoradicRep to_factoradic(std::uint64_t);
  friend FactoradicRep to_factoradic(const Natural&);
  friend FactoradicRep shift(const FactoradicRep&, std::size_t);
  friend FactoradicRep add(const FactoradicRep&, const Natural&);

  std::vector<Digit> digits_;
};

/// Laisant's procedure: divide by 2, 3, 4, ... and keep the remainders.
inline FactoradicRep to_factoradic(std::uint64_t n) {
  std::vector<Digit> d;
  for (std::uint64_t radix = 2; n != 0; ++radix) {
    d.push_back(static_cast<Digit>(n % radix));
    n /= radix;
  }
  return FactoradicRep(std::move(d));
}

inline FactoradicRep to_factoradic(const Natural& n) {
  if (n < 0) throw PreconditionViolated("negative value has no factoradic representation");
  if (auto small = to_u64(n)) return to_factoradic(*small);
  std::vector<Digit> d;
  Natural q = n;
  Natural r;
  for (std::uint64_t radix = 2; q != 0; ++radix) {
    boost::multiprecision::divide_qr(q, Natural(radix), q, r);
    d.push_back(r.convert_to<Digit>());
  }
  return FactoradicRep(std::move(d));
}

/// Number of factoradic digits of n (0 for n = 0).
inline std::size_t digit_count(std::uint64_t n) {
  std::size_t k = 0;
  for (std::uint64_t radix = 2; n != 0; ++radix, ++k) n /= radix;
  return k;
}

inline std::size_t digit_count(const Natural& n) {
  if (auto small = to_u64(n)) return digit_count(*small);
  return to_factoradic(n).size();
}

/// Horner evaluation: n = a_1 + 2(a_2 + 3(a_3 + ...)).
inline Natural to_natural(const FactoradicRep& d) {
  Natural value = 0;
  auto digits = d.digits();
  for (std::size_t k = digits.size(); k-- > 0;) {
    value *= k + 2;  // position k+1 scales everything above it by k+2
    value += digits[k];
  }
  return value;
}

/// f_t: places a_i at position t + i, filling positions 1..t with zeros.
inline FactoradicRep shift(const FactoradicRep& d, std::size_t t) {
  if (d.is_zero() || t == 0) return d;
  std::vector<Digit> out(t + d.size(), 0);
  std::copy(d.digits_.begin(), d.digits_.end(), out.begin() + static_cast<std::ptrdiff_t>(t));
  return FactoradicRep(std::move(out));
}

/// Factorial-base addition with carries: a_i' = s mod (i+1), carry s / (i+1).
inline FactoradicRep add(const FactoradicRep& d, const Natural& y) {
  const FactoradicRep other = to_factoradic(y);
  std::vector<Digit> out = d.digits_;
  if (out.size() < other.size()) out.resize(other.size(), 0);
  std::uint64_t carry = 0;
  std::size_t k = 0;
  for (; k < out.size(); ++k) {
    if (k >= other.size() && carry == 0) break;
    const std::uint64_t radix = k + 2;
    const std::uint64_t s = std::uint64_t{out[k]} + other.digit(k + 1) + carry;
    out[k] = static_cast<Digit>(s % radix);
    carry = s / radix;
  }
  for (std::uint64_t radix = out.size() + 2; carry != 0; ++radix) {
    out.push_back(static_cast<Digit>(carry % radix));
    carry /= radix;
  }
  return FactoradicRep(std::move(out));
}

/// Big-endian text: "2.4.4.0.2.0!" for 2020, "0!" for zero.
inline std::string format(const FactoradicRep& d) {
  if (d.is_zero()) return "0!";
  std::string out;
  auto digits = d.digits();
  for (std::size_t k = digits.size(); k-- > 0;) {
    out += std::to_string(digits[k]);
    out += k == 0 ? '!' : '.';
  }
  return out;
}

inline FactoradicRep parse(std::string_view text) {
  if (text.size() < 2 || text.back() != '!') throw ParseError("factoradic text must end with '!'");
  if (text == "0!") return {};
  std::vector<Digit> big_endian;
  std::string_view body = text.substr(0, text.size() - 1);
  while (true) {
    const std::size_t dot = body.find('.');
    const std::string_view field = body.substr(0, dot);
    if (field.empty() || field.size() > 9) throw ParseError("malformed digit field in '" + std::string(text) + "'");
    Digit value = 0;
    for (char c : field) {
      if (c < '0' || c > '9') throw ParseError("non-digit character in '" + std::string(text) + "'");
      value = value * 10 + static_cast<Digit>(c - '0');
    }
    big_endian.push_back(value);
    if (dot == std::string_view::npos) break;
    body.remove_prefix(dot + 1);
  }
  if (big_endian.front() == 0) throw ParseError("leading zero digit in '" + std::string(text) + "'");
  std::vector<Digit> little(big_endian.rbegin(), big_endian.rend());
  for (std::size_t k = 0; k < little.size(); ++k) {
    if (little[k] > k + 1) {
      throw ParseError("digit " + std::to_string(little[k]) + " at position " + std::to_string(k + 1) +
                       " exceeds bound " + std::to_string(k + 1));
    }
  }
  return FactoradicRep::from_digits(std::move(little));
}

}  // namespace facthappy
