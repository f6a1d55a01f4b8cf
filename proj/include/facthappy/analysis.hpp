#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "facthappy/dynamics.hpp"
#include "facthappy/error.hpp"
#include "facthappy/natural.hpp"

namespace facthappy {

/// True iff the orbit of n reaches the fixed point p.
inline bool is_p_happy(const Natural& n, Exponent e, const Natural& p, const AttractorAtlas& atlas) {
  const auto target = atlas.index_of_fixed_point(p);
  if (!target) throw PreconditionViolated(p.str() + " is not a fixed point for exponent " + std::to_string(e.value()));
  return classify(n, e, &atlas).attractor == atlas.attractor(*target);
}

struct RunRecord {
  Exponent e;
  Natural p;
  std::uint64_t m = 0;
  std::uint64_t start = 0;
};

struct RunSearch {
  std::vector<RunRecord> runs;  // m = 1, 2, ... in order
  bool complete = false;        // every m <= m_max was resolved
  std::uint64_t scanned_through = 0;
};

/// Least start >= floor with start .. start+m-1 all p-happy, for each
/// m <= m_max, in one forward sweep over [floor, cap].
inline RunSearch smallest_runs(Exponent e, const Natural& p, std::uint64_t m_max, std::uint64_t floor,
                               std::uint64_t cap, const AttractorAtlas& atlas) {
  if (m_max < 1) throw PreconditionViolated("m_max must be at least 1");
  if (floor != 1 && floor != 2) throw PreconditionViolated("search floor must be 1 or 2");
  if (atlas.exponent() != e) throw PreconditionViolated("atlas built for a different exponent");
  const auto target = atlas.index_of_fixed_point(p);
  if (!target) throw PreconditionViolated(p.str() + " is not a fixed point for exponent " + std::to_string(e.value()));

  RunSearch result;
  std::uint64_t run = 0;
  std::uint64_t n = floor;
  for (; n <= cap && result.runs.size() < m_max; ++n) {
    run = atlas.resolve(n).attractor == *target ? run + 1 : 0;
    // run grows one at a time, so a new longest run is exactly one longer.
    if (run > result.runs.size()) result.runs.push_back({e, p, run, n - run + 1});
  }
  result.complete = result.runs.size() == m_max;
  result.scanned_through = n - 1;
  return result;
}

/// Exact tally of attractors over the interval [1, upper].
struct DensityReport {
  Exponent e;
  std::uint64_t upper = 0;
  std::vector<std::pair<AttractorId, std::uint64_t>> counts;  // canonical order, nonzero only

  /// count / upper in lowest terms.
  std::pair<std::uint64_t, std::uint64_t> proportion(std::size_t row) const {
    const std::uint64_t count = counts.at(row).second;
    const std::uint64_t g = std::gcd(count, upper);
    return {count / g, upper / g};
  }

  std::uint64_t count_of(const AttractorId& a) const {
    for (const auto& [id, c] : counts) {
      if (id == a) return c;
    }
    return 0;
  }

  friend bool operator==(const DensityReport&, const DensityReport&) = default;
};

/// Worker count from FACTHAPPY_THREADS, else the hardware concurrency.
inline unsigned scan_threads() {
  if (const char* env = std::getenv("FACTHAPPY_THREADS"); env && *env) {
    const Natural v = parse_natural(env);
    if (v < 1 || v > 4096) throw ParseError("FACTHAPPY_THREADS must be a positive integer");
    return v.convert_to<unsigned>();
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct DensityOptions {
  unsigned threads = 0;     // 0: scan_threads()
  unsigned partitions = 0;  // 0: one per thread
};

/// Per-attractor counts over [lo, hi], indexed like atlas.attractors().
inline std::vector<std::uint64_t> tally(std::uint64_t lo, std::uint64_t hi, const AttractorAtlas& atlas) {
  std::vector<std::uint64_t> counts(atlas.attractors().size(), 0);
  for (std::uint64_t n = lo; n <= hi && n != 0; ++n) ++counts[atlas.resolve(n).attractor];
  return counts;
}

inline DensityReport density(Exponent e, std::uint64_t upper, const AttractorAtlas& atlas,
                             DensityOptions options = {}) {
  if (upper < 1) throw PreconditionViolated("interval end must be at least 1");
  if (atlas.exponent() != e) throw PreconditionViolated("atlas built for a different exponent");
  const unsigned threads = options.threads ? options.threads : scan_threads();
  const std::uint64_t parts =
      std::min<std::uint64_t>(std::max(1u, options.partitions ? options.partitions : threads), upper);

  std::vector<std::vector<std::uint64_t>> partial(parts);
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t k; (k = next.fetch_add(1)) < parts;) {
      const std::uint64_t lo = 1 + upper * k / parts;
      const std::uint64_t hi = upper * (k + 1) / parts;
      partial[k] = tally(lo, hi, atlas);
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, parts));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();

  std::vector<std::uint64_t> total(atlas.attractors().size(), 0);
  for (const auto& p : partial) {
    for (std::size_t a = 0; a < total.size(); ++a) total[a] += p[a];
  }
  DensityReport report{e, upper, {}};
  for (std::size_t a = 0; a < total.size(); ++a) {
    if (total[a] != 0) report.counts.emplace_back(atlas.attractors()[a], total[a]);
  }
  return report;
}

enum class ReportFormat { csv, json };

inline std::string emit_report(const DensityReport& report, ReportFormat format) {
  if (format == ReportFormat::csv) {
    std::string out = "e,attractor,count,proportion_num,proportion_den\n";
    for (std::size_t row = 0; row < report.counts.size(); ++row) {
      const auto [num, den] = report.proportion(row);
      out += std::to_string(report.e.value()) + ',' + report.counts[row].first.to_string() + ',' +
             std::to_string(report.counts[row].second) + ',' + std::to_string(num) + ',' + std::to_string(den) + '\n';
    }
    return out;
  }
  nlohmann::ordered_json j;
  j["e"] = report.e.value();
  j["upper"] = report.upper;
  j["rows"] = nlohmann::ordered_json::array();
  for (std::size_t row = 0; row < report.counts.size(); ++row) {
    const auto [num, den] = report.proportion(row);
    nlohmann::ordered_json r;
    r["attractor"] = report.counts[row].first.to_string();
    r["count"] = report.counts[row].second;
    r["proportion_num"] = num;
    r["proportion_den"] = den;
    j["rows"].push_back(r);
  }
  return j.dump() + '\n';
}

inline std::string emit_report(const std::vector<RunRecord>& runs, ReportFormat format) {
  if (format == ReportFormat::csv) {
    std::string out = "e,p,m,start\n";
    for (const RunRecord& r : runs) {
      out += std::to_string(r.e.value()) + ',' + r.p.str() + ',' + std::to_string(r.m) + ',' +
             std::to_string(r.start) + '\n';
    }
    return out;
  }
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const RunRecord& r : runs) {
    nlohmann::ordered_json row;
    row["e"] = r.e.value();
    row["p"] = r.p.convert_to<std::uint64_t>();
    row["m"] = r.m;
    row["start"] = r.start;
    j.push_back(row);
  }
  return j.dump() + '\n';
}

}  // namespace facthappy
