#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "facthappy/dynamics.hpp"
#include "facthappy/error.hpp"
#include "facthappy/factoradic.hpp"
#include "facthappy/natural.hpp"

namespace facthappy {

/// Largest all-ones block preimage_ones will allocate.
inline constexpr std::uint64_t kMaxOnesDigits = 200'000'000;

/// sum_{i=1}^{x} i!, whose digits are x ones. Its image under S_{e,!} is x
/// for every e.
inline FactoradicRep preimage_ones(const Natural& x) {
  if (x < 1) throw PreconditionViolated("all-ones preimage requires x >= 1");
  const auto count = to_u64(x);
  if (!count || *count > kMaxOnesDigits) {
    throw SizeCapExceeded("all-ones block of " + x.str() + " digits is too large to build");
  }
  return FactoradicRep::from_digits(std::vector<Digit>(*count, 1));
}

struct AdditivityResult {
  bool precondition_met;  // t >= digit count of y
  bool holds;             // S(f_t(x) + y) == S(x) + S(y)
};

/// Evaluates both sides of S(f_t(x) + y) = S(x) + S(y) concretely. The
/// identity is guaranteed only when precondition_met; when it is not, holds
/// reports what actually happened.
inline AdditivityResult additivity_check(const Natural& x, const Natural& y, std::size_t t, Exponent e) {
  const bool pre = digit_count(y) <= t;
  const Natural lhs = happy_step(add(shift(to_factoradic(x), t), y), e);
  const Natural rhs = happy_step_nat(x, e) + happy_step_nat(y, e);
  return {pre, lhs == rhs};
}

/// An offset l such that every member u of U_{e,!} reaches p from l + u.
struct NiceWitness {
  Exponent e;
  Natural p;
  Natural l;
  std::map<std::uint64_t, std::uint64_t> steps;  // u -> q_u, first hit of p
};

/// Checks that l makes U_{e,!} (e, p)-nice, allowing at most cap iterations
/// per member.
inline NiceWitness nice_check(Exponent e, const Natural& p, const Natural& l, const AttractorAtlas& atlas,
                              std::uint64_t cap = 1000) {
  if (atlas.exponent() != e) throw PreconditionViolated("atlas built for a different exponent");
  if (!atlas.index_of_fixed_point(p)) {
    throw PreconditionViolated(p.str() + " is not a fixed point for exponent " + std::to_string(e.value()));
  }
  NiceWitness witness{e, p, l, {}};
  for (std::uint64_t u : atlas.attractor_members()) {
    Natural v = l + u;
    std::uint64_t q = 0;
    while (v != p) {
      if (q == cap) {
        const OrbitReport orbit = classify(l + u, e, &atlas);
        throw WitnessFailure("u=" + std::to_string(u) + ": l+u=" + Natural(l + u).str() + " enters attractor " +
                             orbit.attractor.to_string() + ", not " + p.str() + " within " + std::to_string(cap) +
                             " steps");
      }
      v = detail::step_with(atlas.map(), v);
      ++q;
    }
    witness.steps.emplace(u, q);
  }
  return witness;
}

/// Offsets l for every fixed point with e in {2, 3, 4}.
inline std::optional<Natural> known_witness_offset(Exponent e, const Natural& p) {
  struct Row {
    unsigned e;
    unsigned p;
    unsigned l;
  };
  static constexpr Row kTable[] = {
      {2, 1, 20},   {2, 4, 2841},   {2, 5, 45},    {3, 1, 2},      {3, 16, 50127},
      {3, 17, 4506}, {4, 1, 6}, {4, 658, 65763}, {4, 659, 31743},
  };
  for (const Row& row : kTable) {
    if (row.e == e.value() && p == row.p) return Natural(row.l);
  }
  return std::nullopt;
}

/// Symbolic tower l_0 of the constructive proof:
///   l_r = base_l, and l_j = f_t(ones(l_{j+1})) for j < r.
/// Beyond one level the digit count of l_j is the value of l_{j+1}, so the
/// number is kept symbolic.
struct ChainNumber {
  Natural base_l;
  std::size_t shift_t = 0;
  std::size_t depth_r = 0;

  ChainNumber next_level() const {
    if (depth_r == 0) throw PreconditionViolated("depth-0 chain has no next level");
    return {base_l, shift_t, depth_r - 1};
  }

  friend bool operator==(const ChainNumber&, const ChainNumber&) = default;
};

/// chain + offset, the form every replay step works on.
struct ChainSum {
  ChainNumber level;
  Natural offset;
};

/// S(l_j + y) = l_{j+1} + S(y), valid when y has at most t digits.
inline ChainSum apply_symbolic(const ChainSum& s, Exponent e) {
  if (s.level.depth_r == 0) throw ReplayFailure("symbolic step applied to a concrete level");
  if (digit_count(s.offset) > s.level.shift_t) {
    throw ReplayFailure("offset " + s.offset.str() + " has more than t=" + std::to_string(s.level.shift_t) +
                        " digits");
  }
  return {s.level.next_level(), happy_step_nat(s.offset, e)};
}

struct RunStep {
  std::uint64_t i;
  std::uint64_t steps;  // n_i' with S^{n_i'}(l_0 + i) = p
};

struct SequenceCertificate {
  Exponent e;
  Natural p;
  std::uint64_t m = 0;
  std::size_t t = 0;
  std::size_t r = 0;
  ChainNumber chain;
  std::vector<RunStep> per_i;
  std::string size_note;
};

namespace detail {

// log10 of a number with k factoradic digits, from its top place value k!.
inline double log10_lower(std::size_t k) { return std::lgamma(static_cast<double>(k) + 1.0) / std::log(10.0); }

inline std::string describe_size(const ChainNumber& chain) {
  std::ostringstream out;
  const std::size_t t = chain.shift_t;
  if (chain.depth_r == 0) {
    out << "concrete: l_0 = l = " << chain.base_l.str();
    return out.str();
  }
  const Natural level1_digits = chain.base_l + t;
  out << "ones-block of " << chain.base_l.str() << " digits shifted by " << t;
  if (chain.depth_r == 1) {
    out << "; l_0 has " << level1_digits.str() << " factoradic digits";
    return out.str();
  }
  const double exponent10 = log10_lower(level1_digits.convert_to<std::size_t>());
  out << ", then ones-block of the previous value shifted by " << t << ", applied " << chain.depth_r
      << " times in total; l_" << chain.depth_r - 1 << " has " << level1_digits.str()
      << " factoradic digits (value about 10^" << static_cast<long long>(exponent10) << "), so l_"
      << chain.depth_r - 2 << " has about 10^" << static_cast<long long>(exponent10) << " digits";
  if (chain.depth_r > 2) out << " and each further level has as many digits as the previous level's value";
  return out.str();
}

}  // namespace detail

/// Builds and replays the consecutive-run certificate for i = 1..m.
///
/// r is the least count with S^r(i) in U_{e,!} for every i, and t the widest
/// digit count along those orbits. Each i is replayed symbolically down the
/// chain, then the concrete tail l + S^r(i) is iterated q_u times to p.
inline SequenceCertificate build_sequence(Exponent e, const Natural& p, std::uint64_t m, const NiceWitness& witness,
                                          const AttractorAtlas& atlas) {
  if (m < 1) throw PreconditionViolated("run length must be at least 1");
  if (witness.e != e || witness.p != p) throw PreconditionViolated("witness does not match (e, p)");
  if (atlas.exponent() != e) throw PreconditionViolated("atlas built for a different exponent");

  std::size_t r = 0;
  for (std::uint64_t i = 1; i <= m; ++i) r = std::max<std::size_t>(r, atlas.resolve(i).steps);
  std::size_t t = 0;
  for (std::uint64_t i = 1; i <= m; ++i) {
    std::uint64_t v = i;
    for (std::size_t j = 0; j <= r; ++j) {
      t = std::max(t, digit_count(v));
      v = atlas.map()(v);
    }
  }

  SequenceCertificate cert{e, p, m, t, r, ChainNumber{witness.l, t, r}, {}, {}};
  for (std::uint64_t i = 1; i <= m; ++i) {
    ChainSum s{cert.chain, Natural(i)};
    for (std::size_t j = 0; j < r; ++j) s = apply_symbolic(s, e);
    const auto u = to_u64(s.offset);
    if (!u) throw ReplayFailure("S^r(" + std::to_string(i) + ") does not fit 64 bits");
    auto q = witness.steps.find(*u);
    if (q == witness.steps.end()) {
      throw ReplayFailure("S^r(" + std::to_string(i) + ") = " + std::to_string(*u) + " is not an attractor member");
    }
    if (iterate(witness.l + *u, e, q->second) != p) {
      throw ReplayFailure("concrete tail from l + " + std::to_string(*u) + " does not reach " + p.str());
    }
    cert.per_i.push_back({i, q->second + r});
  }
  cert.size_note = detail::describe_size(cert.chain);
  return cert;
}

/// Expands a chain into concrete digits when the result has at most
/// size_cap digits.
inline FactoradicRep materialize(const ChainNumber& chain, std::uint64_t size_cap) {
  FactoradicRep rep = to_factoradic(chain.base_l);
  if (rep.size() > size_cap) throw SizeCapExceeded("base value alone exceeds the size cap");
  for (std::size_t d = 1; d <= chain.depth_r; ++d) {
    // The next level has t + value(rep) digits, and value(rep) >= size!.
    if (rep.size() > 30) {
      throw SizeCapExceeded("level " + std::to_string(d) + " of the chain needs about 10^" +
                            std::to_string(static_cast<long long>(detail::log10_lower(rep.size()))) +
                            " digits, above the cap of " + std::to_string(size_cap));
    }
    const Natural value = to_natural(rep);
    const Natural digits = value + chain.shift_t;
    if (digits > size_cap) {
      throw SizeCapExceeded("level " + std::to_string(d) + " of the chain needs " + digits.str() +
                            " digits, above the cap of " + std::to_string(size_cap));
    }
    rep = shift(preimage_ones(value), chain.shift_t);
  }
  return rep;
}

/// Replays every entry of a certificate on materialized numbers and checks
/// each intermediate value against the symbolic form l_j + S^j(i).
/// Throws SizeCapExceeded when the chain cannot be materialized.
inline bool verify_concretely(const SequenceCertificate& cert, std::uint64_t size_cap) {
  const Exponent e = cert.e;
  std::vector<FactoradicRep> levels;  // levels[j] = l_j
  for (std::size_t j = 0; j <= cert.r; ++j) {
    levels.push_back(materialize({cert.chain.base_l, cert.t, cert.r - j}, size_cap));
  }
  for (const RunStep& entry : cert.per_i) {
    Natural y = entry.i;
    Natural value = happy_step(add(levels[0], y), e);  // S(l_0 + i)
    std::uint64_t taken = 1;
    if (cert.r == 0) {
      value = to_natural(add(levels[0], y));
      taken = 0;
    }
    for (std::size_t j = 1; j <= cert.r; ++j) {
      y = happy_step_nat(y, e);
      if (value != to_natural(levels[j]) + y) return false;
      if (j < cert.r) {
        value = happy_step_nat(value, e);
        ++taken;
      }
    }
    if (entry.steps < taken) return false;
    if (iterate(value, e, entry.steps - taken) != cert.p) return false;
  }
  return true;
}

namespace detail {

inline nlohmann::ordered_json json_natural(const Natural& n) {
  if (auto small = to_u64(n)) return *small;
  return n.str();
}

}  // namespace detail

/// Stable-key JSON: e, p, m, t, r, l, per_i, size_note.
inline std::string to_json(const SequenceCertificate& cert) {
  nlohmann::ordered_json j;
  j["e"] = cert.e.value();
  j["p"] = detail::json_natural(cert.p);
  j["m"] = cert.m;
  j["t"] = cert.t;
  j["r"] = cert.r;
  j["l"] = detail::json_natural(cert.chain.base_l);
  j["per_i"] = nlohmann::ordered_json::array();
  for (const RunStep& s : cert.per_i) {
    nlohmann::ordered_json row;
    row["i"] = s.i;
    row["steps"] = s.steps;
    j["per_i"].push_back(row);
  }
  j["size_note"] = cert.size_note;
  return j.dump();
}

}  // namespace facthappy
