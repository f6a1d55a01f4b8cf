#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "facthappy/error.hpp"
#include "facthappy/factoradic.hpp"
#include "facthappy/natural.hpp"

namespace facthappy {

/// The exponent e >= 1 of the happy function.
class Exponent {
 public:
  explicit Exponent(unsigned e) : e_(e) {
    if (e < 1) throw PreconditionViolated("exponent must be at least 1");
  }
  unsigned value() const noexcept { return e_; }
  friend auto operator<=>(const Exponent&, const Exponent&) = default;

 private:
  unsigned e_;
};

/// S_{e,!} on a representation: the sum of the e-th powers of the digits.
inline Natural happy_step(const FactoradicRep& d, Exponent e) {
  // Digits repeat heavily in long representations (all-ones blocks), so
  // count first and raise each distinct digit once.
  std::map<Digit, std::uint64_t> histogram;
  for (Digit a : d.digits()) {
    if (a != 0) ++histogram[a];
  }
  Natural sum = 0;
  for (const auto& [a, count] : histogram) sum += power(Natural(a), e.value()) * count;
  return sum;
}

/// S_{e,!} specialized to 64-bit arguments with a precomputed power table.
///
/// A 64-bit value has at most 20 factoradic digits, each at most 20, so the
/// table covers every digit that can occur. exact() reports whether the sum
/// of the table entries fits in 64 bits, in which case operator() is total.
class PowerSum {
 public:
  static constexpr std::size_t kMaxDigit = 20;

  explicit PowerSum(Exponent e) : e_(e) {
    Natural total = 0;
    for (std::size_t a = 0; a <= kMaxDigit; ++a) {
      const Natural p = power(Natural(a), e.value());
      total += p;
      powers_[a] = to_u64(p).value_or(0);
    }
    exact_ = to_u64(total).has_value();
  }

  Exponent exponent() const noexcept { return e_; }
  bool exact() const noexcept { return exact_; }

  std::uint64_t operator()(std::uint64_t n) const noexcept {
    std::uint64_t sum = 0;
    for (std::uint64_t radix = 2; n != 0; ++radix) {
      sum += powers_[n % radix];
      n /= radix;
    }
    return sum;
  }

 private:
  Exponent e_;
  std::array<std::uint64_t, kMaxDigit + 1> powers_{};
  bool exact_ = false;
};

namespace detail {

inline Natural step_with(const PowerSum& fast, const Natural& n) {
  if (fast.exact()) {
    if (auto small = to_u64(n)) return Natural(fast(*small));
  }
  return happy_step(to_factoradic(n), fast.exponent());
}

}  // namespace detail

inline Natural happy_step_nat(const Natural& n, Exponent e) { return detail::step_with(PowerSum(e), n); }

/// S^count(n); S^0(n) = n.
inline Natural iterate(const Natural& n, Exponent e, std::uint64_t count) {
  const PowerSum fast(e);
  Natural v = n;
  for (std::uint64_t k = 0; k < count; ++k) v = detail::step_with(fast, v);
  return v;
}

/// A fixed point (one member) or a cycle (two or more members, rotated so
/// the minimum comes first).
class AttractorId {
 public:
  static AttractorId fixed_point(Natural p) { return AttractorId({std::move(p)}); }

  /// Members in orbit order, any rotation.
  static AttractorId cycle(std::vector<Natural> orbit_order) {
    if (orbit_order.empty()) throw PreconditionViolated("empty attractor");
    auto smallest = std::min_element(orbit_order.begin(), orbit_order.end());
    std::rotate(orbit_order.begin(), smallest, orbit_order.end());
    return AttractorId(std::move(orbit_order));
  }

  bool is_fixed_point() const noexcept { return members_.size() == 1; }
  const std::vector<Natural>& members() const noexcept { return members_; }
  const Natural& smallest() const noexcept { return members_.front(); }

  /// Members joined by ';' ("5" or "2114;3401").
  std::string to_string() const {
    std::string out;
    for (const Natural& m : members_) {
      if (!out.empty()) out += ';';
      out += m.str();
    }
    return out;
  }

  friend bool operator==(const AttractorId&, const AttractorId&) = default;
  friend bool operator<(const AttractorId& a, const AttractorId& b) {
    if (a.smallest() != b.smallest()) return a.smallest() < b.smallest();
    return a.members_ < b.members_;
  }

 private:
  explicit AttractorId(std::vector<Natural> m) : members_(std::move(m)) {}
  std::vector<Natural> members_;
};

struct OrbitReport {
  Natural start;
  Exponent e;
  std::uint64_t steps_to_attractor = 0;
  AttractorId attractor;
  /// S^0(start) .. S^steps(start) when requested.
  std::optional<std::vector<Natural>> trajectory;
};

/// Least j with j! > j^(e-1).
inline unsigned smallest_j(Exponent e) {
  Natural fact = 1;
  for (unsigned j = 1;; ++j) {
    fact *= j;
    if (fact > power(Natural(j), e.value() - 1)) return j;
  }
}

/// Descent bound M_e with an exact-integer certificate that S_{e,!}(n) < n
/// for every n > M_e.
struct DescentBound {
  Exponent e;
  unsigned j = 0;
  Natural bound;        // M_e = (j+1)! - 1
  Natural tail_offset;  // C_e, sum over 2 <= i < j of min_a (a*i! - a^e)
  bool base_case_ok = false;
  bool induction_ok = false;
  bool dominance_ok = false;

  bool certificate_ok() const noexcept { return base_case_ok && induction_ok && dominance_ok; }

  /// Empty when certified, otherwise names the first failing check.
  std::string failure() const {
    if (!base_case_ok) return "base case j! > j^(e-1) failed";
    if (!induction_ok) return "induction step (j+1)^(e-1) <= j^(e-1)*(j+1) failed";
    if (!dominance_ok) return "dominance (j+1)! - (j+1)^(e-1) + C > 0 failed";
    return {};
  }

  void require_certified() const {
    if (!certificate_ok()) {
      throw CertificateFailed("exponent " + std::to_string(e.value()) + ": " + failure());
    }
  }
};

inline DescentBound descent_bound(Exponent e) {
  DescentBound b{e, 0, 0, 0};
  const unsigned ev = e.value();
  b.j = smallest_j(e);
  b.bound = factorial(b.j + 1) - 1;

  Natural offset = 0;
  for (unsigned i = 2; i + 1 <= b.j; ++i) {
    const Natural fi = factorial(i);
    Natural best = 0;  // a = 0
    for (unsigned a = 1; a <= i; ++a) best = std::min(best, Natural(a * fi - power(Natural(a), ev)));
    offset += best;
  }
  b.tail_offset = offset;

  const Natural jn(b.j);
  const Natural next(b.j + 1);
  b.base_case_ok = factorial(b.j) > power(jn, ev - 1);
  // (1 + 1/k)^(e-1) shrinks as k grows, so this single check propagates
  // k! > k^(e-1) to every k >= j.
  b.induction_ok = power(next, ev - 1) <= power(jn, ev - 1) * next;
  b.dominance_ok = factorial(b.j + 1) - power(next, ev - 1) + b.tail_offset > 0;
  return b;
}

/// Every fixed point and cycle of S_{e,!}, with the attractor and step count
/// of each n in [1, M_e]. Immutable after build() and safe to share.
class AttractorAtlas {
 public:
  struct Entry {
    std::uint32_t attractor;  // index into attractors()
    std::uint64_t steps;
  };

  struct Limits {
    std::uint64_t max_memo = 100'000'000;
    std::uint64_t iteration_cap = 1'000'000;
  };

  static AttractorAtlas build(Exponent e) { return build(e, Limits{}); }

  static AttractorAtlas build(Exponent e, Limits limits) {
    DescentBound bound = descent_bound(e);
    bound.require_certified();
    PowerSum fast(e);
    const auto memo = to_u64(bound.bound);
    if (!memo || *memo > limits.max_memo) {
      throw SizeCapExceeded("atlas for exponent " + std::to_string(e.value()) + " needs " + bound.bound.str() +
                            " entries, above the cap of " + std::to_string(limits.max_memo));
    }
    if (!fast.exact()) {
      throw SizeCapExceeded("exponent " + std::to_string(e.value()) + " overflows 64-bit digit power sums");
    }
    AttractorAtlas atlas(std::move(bound), fast, *memo);
    atlas.fill(limits.iteration_cap);
    return atlas;
  }

  Exponent exponent() const noexcept { return bound_.e; }
  const DescentBound& bound() const noexcept { return bound_; }
  const PowerSum& map() const noexcept { return fast_; }
  std::uint64_t memo_limit() const noexcept { return limit_; }

  /// Canonical order: by smallest member.
  std::span<const AttractorId> attractors() const noexcept { return attractors_; }
  const AttractorId& attractor(std::uint32_t index) const { return attractors_.at(index); }

  std::vector<Natural> fixed_points() const {
    std::vector<Natural> out;
    for (const auto& a : attractors_) {
      if (a.is_fixed_point()) out.push_back(a.smallest());
    }
    return out;
  }

  std::vector<AttractorId> cycles() const {
    std::vector<AttractorId> out;
    for (const auto& a : attractors_) {
      if (!a.is_fixed_point()) out.push_back(a);
    }
    return out;
  }

  /// All members of U_{e,!} in increasing order.
  std::vector<std::uint64_t> attractor_members() const {
    std::vector<std::uint64_t> out;
    for (const auto& a : attractors_) {
      for (const auto& m : a.members()) out.push_back(m.convert_to<std::uint64_t>());
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::optional<std::uint32_t> index_of(const AttractorId& a) const {
    auto it = std::find(attractors_.begin(), attractors_.end(), a);
    if (it == attractors_.end()) return std::nullopt;
    return static_cast<std::uint32_t>(it - attractors_.begin());
  }

  std::optional<std::uint32_t> index_of_fixed_point(const Natural& p) const {
    return index_of(AttractorId::fixed_point(p));
  }

  /// Memoized entry for n in [1, M_e].
  Entry entry(std::uint64_t n) const {
    if (n < 1 || n > limit_) throw PreconditionViolated("value outside the memoized range [1, M_e]");
    return {attractor_of_[n], steps_[n]};
  }

  /// Attractor and minimal step count for any n >= 1. Values above M_e
  /// strictly descend, so the loop reaches the memo after a few steps.
  Entry resolve(std::uint64_t n) const {
    if (n == 0) throw PreconditionViolated("0 is not classified");
    std::uint64_t steps = 0;
    while (n > limit_) {
      if (!large_members_.empty()) {
        if (auto it = large_members_.find(n); it != large_members_.end()) return {it->second, steps};
      }
      n = fast_(n);
      ++steps;
    }
    return {attractor_of_[n], steps + steps_[n]};
  }

  bool in_attractor(std::uint64_t n) const { return n >= 1 && resolve(n).steps == 0; }

 private:
  static constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  static constexpr std::uint32_t kOnPath = kUnset - 1;

  AttractorAtlas(DescentBound bound, PowerSum fast, std::uint64_t limit)
      : bound_(std::move(bound)), fast_(fast), limit_(limit) {}

  void fill(std::uint64_t iteration_cap) {
    attractor_of_.assign(limit_ + 1, kUnset);
    steps_.assign(limit_ + 1, 0);
    std::vector<std::vector<std::uint64_t>> found;  // orbit order, discovery order
    std::vector<std::uint64_t> path;
    std::unordered_map<std::uint64_t, std::size_t> large_on_path;

    for (std::uint64_t n = 1; n <= limit_; ++n) {
      if (attractor_of_[n] != kUnset) continue;
      path.clear();
      large_on_path.clear();
      std::uint64_t v = n;
      std::optional<std::size_t> cycle_start;
      std::uint32_t base_attractor = kUnset;
      std::uint64_t base_steps = 0;
      while (true) {
        if (path.size() > iteration_cap) {
          throw IterationCapExceeded("orbit of " + std::to_string(n) + " exceeded the iteration cap");
        }
        if (v <= limit_) {
          const std::uint32_t state = attractor_of_[v];
          if (state == kOnPath) {
            cycle_start = steps_[v];
            break;
          }
          if (state != kUnset) {
            base_attractor = state;
            base_steps = steps_[v];
            break;
          }
          attractor_of_[v] = kOnPath;
          steps_[v] = path.size();
        } else {
          if (auto it = large_members_.find(v); it != large_members_.end()) {
            base_attractor = it->second;
            base_steps = 0;
            break;
          }
          auto [it, fresh] = large_on_path.emplace(v, path.size());
          if (!fresh) {
            cycle_start = it->second;
            break;
          }
        }
        path.push_back(v);
        v = fast_(v);
      }

      if (cycle_start) {
        base_attractor = static_cast<std::uint32_t>(found.size());
        found.emplace_back(path.begin() + static_cast<std::ptrdiff_t>(*cycle_start), path.end());
        for (std::size_t k = *cycle_start; k < path.size(); ++k) {
          if (path[k] <= limit_) {
            attractor_of_[path[k]] = base_attractor;
            steps_[path[k]] = 0;
          } else {
            large_members_.emplace(path[k], base_attractor);
          }
        }
        path.resize(*cycle_start);
        base_steps = 0;
      }
      const std::size_t len = path.size();
      for (std::size_t k = 0; k < len; ++k) {
        if (path[k] <= limit_) {
          attractor_of_[path[k]] = base_attractor;
          steps_[path[k]] = base_steps + (len - k);
        }
      }
    }

    // Renumber attractors into canonical order.
    std::vector<AttractorId> raw;
    for (const auto& orbit : found) raw.push_back(AttractorId::cycle({orbit.begin(), orbit.end()}));
    std::vector<std::uint32_t> order(raw.size());
    for (std::uint32_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return raw[a] < raw[b]; });
    std::vector<std::uint32_t> remap(raw.size());
    for (std::uint32_t k = 0; k < order.size(); ++k) {
      remap[order[k]] = k;
      attractors_.push_back(raw[order[k]]);
    }
    for (std::uint64_t n = 1; n <= limit_; ++n) attractor_of_[n] = remap[attractor_of_[n]];
    for (auto& [value, index] : large_members_) index = remap[index];
  }

  DescentBound bound_;
  PowerSum fast_;
  std::uint64_t limit_;
  std::vector<std::uint32_t> attractor_of_;
  std::vector<std::uint64_t> steps_;
  std::unordered_map<std::uint64_t, std::uint32_t> large_members_;
  std::vector<AttractorId> attractors_;
};

struct ClassifyOptions {
  std::uint64_t iteration_cap = 1'000'000;
  bool record_trajectory = false;
};

/// Iterates S_{e,!} from n until the orbit enters a fixed point or cycle.
///
/// Without an atlas every visited value is remembered until one repeats.
/// With an atlas the orbit descends until it lands in the memoized range,
/// then the stored answer is spliced in.
inline OrbitReport classify(const Natural& n, Exponent e, const AttractorAtlas* atlas = nullptr,
                            ClassifyOptions options = {}) {
  if (n < 1) throw PreconditionViolated("classify requires n >= 1");
  if (atlas && atlas->exponent() != e) throw PreconditionViolated("atlas built for a different exponent");

  const PowerSum local(e);
  const PowerSum& fast = atlas ? atlas->map() : local;
  std::vector<Natural> trajectory;

  if (atlas) {
    Natural v = n;
    std::uint64_t steps = 0;
    while (true) {
      if (auto small = to_u64(v)) {
        const auto entry = atlas->resolve(*small);
        if (options.record_trajectory) {
          trajectory.push_back(v);
          for (std::uint64_t k = 0; k < entry.steps; ++k) {
            v = detail::step_with(fast, v);
            trajectory.push_back(v);
          }
        }
        OrbitReport report{n, e, steps + entry.steps, atlas->attractor(entry.attractor), std::nullopt};
        if (options.record_trajectory) report.trajectory = std::move(trajectory);
        return report;
      }
      if (steps >= options.iteration_cap) throw IterationCapExceeded("orbit exceeded the iteration cap");
      if (options.record_trajectory) trajectory.push_back(v);
      v = detail::step_with(fast, v);
      ++steps;
    }
  }

  std::map<Natural, std::uint64_t> visited;
  std::vector<Natural> path;
  Natural v = n;
  while (true) {
    auto [it, fresh] = visited.emplace(v, path.size());
    if (!fresh) break;
    if (path.size() >= options.iteration_cap) throw IterationCapExceeded("orbit exceeded the iteration cap");
    path.push_back(v);
    v = detail::step_with(fast, v);
  }
  const std::uint64_t entry_step = visited.at(v);
  std::vector<Natural> members(path.begin() + static_cast<std::ptrdiff_t>(entry_step), path.end());
  OrbitReport report{n, e, entry_step, AttractorId::cycle(std::move(members)), std::nullopt};
  if (options.record_trajectory) {
    path.resize(entry_step + 1);
    report.trajectory = std::move(path);
  }
  return report;
}

}  // namespace facthappy
