#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "facthappy/facthappy.hpp"

namespace facthappy::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kFailure = 2 };

namespace detail {

inline std::uint64_t parse_u64(const std::string& text, const char* what) {
  const Natural n = parse_natural(text);
  auto v = to_u64(n);
  if (!v) throw ParseError(std::string(what) + " does not fit 64 bits: " + text);
  return *v;
}

inline Exponent parse_exponent(const std::string& text) {
  const std::uint64_t v = parse_u64(text, "--e");
  if (v < 1 || v > 1'000'000) throw ParseError("--e must be a positive integer");
  return Exponent(static_cast<unsigned>(v));
}

inline ReportFormat parse_format(const std::string& text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  throw ParseError("unknown format '" + text + "'");
}

inline std::string describe(const AttractorId& a) {
  return (a.is_fixed_point() ? "fixed " : "cycle ") + a.to_string();
}

inline std::string decimal(std::uint64_t num, std::uint64_t den) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << static_cast<double>(num) / static_cast<double>(den);
  return out.str();
}

}  // namespace detail

/// Parses argv (without the program name), runs one command and returns
/// the exit status. Every error is reported as one line on err.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Factorial number system and factoradic happy function toolkit", "facthappy"};
  app.require_subcommand(1);

  std::string number, digits, e_text, p_text = "1", l_text, m_text, cap_text, upper_text, format_text;
  std::string floor_text = "2", partitions_text;
  bool trace = false;

  auto* convert = app.add_subcommand("convert", "decimal <-> factoradic digits");
  convert->add_option("n", number, "decimal number");
  convert->add_option("--digits", digits, "factoradic text such as 2.4.4.0.2.0!");

  auto* orbit = app.add_subcommand("orbit", "iterate from n until a fixed point or cycle");
  orbit->add_option("n", number, "start value")->required();
  orbit->add_option("--e", e_text, "exponent")->required();
  orbit->add_flag("--trace", trace, "print step, value and digits per step");
  orbit->add_option("--cap", cap_text, "iteration cap");

  auto* attractors = app.add_subcommand("attractors", "fixed points and cycles");
  attractors->add_option("--e", e_text, "exponent")->required();
  attractors->add_option("--format", format_text, "csv");

  auto* bound = app.add_subcommand("bound", "descent bound M_e and its certificate");
  bound->add_option("--e", e_text, "exponent")->required();

  auto* nice = app.add_subcommand("nice", "check an offset witness");
  nice->add_option("--e", e_text, "exponent")->required();
  nice->add_option("--p", p_text, "fixed point")->required();
  nice->add_option("--l", l_text, "offset")->required();
  nice->add_option("--cap", cap_text, "iteration cap per member");

  auto* build = app.add_subcommand("build", "certify m consecutive p-happy numbers");
  build->add_option("--e", e_text, "exponent")->required();
  build->add_option("--p", p_text, "fixed point")->required();
  build->add_option("--m", m_text, "run length")->required();
  build->add_option("--l", l_text, "offset (default: built-in witness)");
  build->add_option("--format", format_text, "json");

  auto* runs = app.add_subcommand("runs", "smallest runs of consecutive p-happy numbers");
  runs->add_option("--e", e_text, "exponent")->required();
  runs->add_option("--p", p_text, "fixed point (default 1)");
  runs->add_option("--max-m", m_text, "largest run length")->required();
  runs->add_option("--floor", floor_text, "search floor, 1 or 2 (default 2)");
  runs->add_option("--cap", cap_text, "last value scanned");
  runs->add_option("--format", format_text, "csv|json");

  auto* dens = app.add_subcommand("density", "attractor proportions over [1, L]");
  dens->add_option("--e", e_text, "exponent")->required();
  dens->add_option("--upper", upper_text, "interval end L")->required();
  dens->add_option("--format", format_text, "csv|json");
  dens->add_option("--partitions", partitions_text, "number of sub-intervals");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    err << "facthappy: usage: " << message << '\n';
    return kUsage;
  }

  using detail::parse_exponent;
  using detail::parse_u64;
  std::ostringstream buffer;  // nothing reaches out unless the command succeeds
  try {
    // Validate every flag before computing.
    std::optional<ReportFormat> report_format;
    if (!format_text.empty()) report_format = detail::parse_format(format_text);
    const unsigned threads = scan_threads();

    if (convert->parsed()) {
      if (number.empty() == digits.empty()) throw ParseError("convert takes exactly one of <n> or --digits");
      if (!number.empty()) {
        buffer << facthappy::format(to_factoradic(parse_natural(number))) << '\n';
      } else {
        buffer << to_natural(parse(digits)).str() << '\n';
      }
    } else if (orbit->parsed()) {
      const Natural n = parse_natural(number);
      const Exponent e = parse_exponent(e_text);
      ClassifyOptions options;
      options.record_trajectory = trace;
      if (!cap_text.empty()) options.iteration_cap = parse_u64(cap_text, "--cap");
      const OrbitReport report = classify(n, e, nullptr, options);
      if (trace) {
        for (std::size_t k = 0; k < report.trajectory->size(); ++k) {
          const Natural& v = (*report.trajectory)[k];
          buffer << k << '\t' << v.str() << '\t' << facthappy::format(to_factoradic(v)) << '\n';
        }
      } else {
        buffer << "start " << n.str() << '\n'
               << "e " << e.value() << '\n'
               << "attractor " << detail::describe(report.attractor) << '\n'
               << "steps " << report.steps_to_attractor << '\n';
      }
    } else if (attractors->parsed()) {
      if (report_format && *report_format != ReportFormat::csv) throw ParseError("attractors supports --format csv only");
      const Exponent e = parse_exponent(e_text);
      const AttractorAtlas atlas = AttractorAtlas::build(e);
      if (report_format) {
        buffer << "kind,members\n";
        for (const auto& a : atlas.attractors()) {
          buffer << (a.is_fixed_point() ? "fixed," : "cycle,") << a.to_string() << '\n';
        }
      } else {
        buffer << "e " << e.value() << '\n' << "M_e " << atlas.bound().bound.str() << '\n' << "fixed points:";
        for (const auto& p : atlas.fixed_points()) buffer << ' ' << p.str();
        buffer << '\n' << "cycles:";
        const auto cycles = atlas.cycles();
        if (cycles.empty()) buffer << " none";
        buffer << '\n';
        for (const auto& c : cycles) {
          buffer << " ";
          for (const auto& m : c.members()) buffer << ' ' << m.str() << " ->";
          buffer << ' ' << c.smallest().str() << '\n';
        }
      }
    } else if (bound->parsed()) {
      const DescentBound b = descent_bound(parse_exponent(e_text));
      buffer << "e " << b.e.value() << '\n'
             << "j_e " << b.j << '\n'
             << "M_e " << b.bound.str() << '\n'
             << "C_e " << b.tail_offset.str() << '\n'
             << "base_case " << (b.base_case_ok ? "ok" : "FAILED") << '\n'
             << "induction " << (b.induction_ok ? "ok" : "FAILED") << '\n'
             << "dominance " << (b.dominance_ok ? "ok" : "FAILED") << '\n'
             << "certificate " << (b.certificate_ok() ? "ok" : "FAILED") << '\n';
      out << buffer.str();
      buffer.str("");
      b.require_certified();
    } else if (nice->parsed()) {
      const Exponent e = parse_exponent(e_text);
      const Natural p = parse_natural(p_text);
      const Natural l = parse_natural(l_text);
      const std::uint64_t cap = cap_text.empty() ? 1000 : parse_u64(cap_text, "--cap");
      const AttractorAtlas atlas = AttractorAtlas::build(e);
      const NiceWitness w = nice_check(e, p, l, atlas, cap);
      buffer << "e " << e.value() << " p " << p.str() << " l " << l.str() << " nice\n";
      for (const auto& [u, q] : w.steps) buffer << "u " << u << " q " << q << '\n';
    } else if (build->parsed()) {
      if (report_format && *report_format != ReportFormat::json) throw ParseError("build supports --format json only");
      const Exponent e = parse_exponent(e_text);
      const Natural p = parse_natural(p_text);
      const std::uint64_t m = parse_u64(m_text, "--m");
      if (m < 1) throw ParseError("--m must be at least 1");
      Natural l;
      if (!l_text.empty()) {
        l = parse_natural(l_text);
      } else if (auto known = known_witness_offset(e, p)) {
        l = *known;
      } else {
        throw ParseError("no built-in witness for this (e, p); pass --l");
      }
      const AttractorAtlas atlas = AttractorAtlas::build(e);
      const NiceWitness w = nice_check(e, p, l, atlas);
      const SequenceCertificate cert = build_sequence(e, p, m, w, atlas);
      if (report_format) {
        buffer << to_json(cert) << '\n';
      } else {
        buffer << "e " << e.value() << " p " << p.str() << " m " << m << '\n'
               << "t " << cert.t << " r " << cert.r << " l " << cert.chain.base_l.str() << '\n'
               << "size " << cert.size_note << '\n';
        for (const RunStep& s : cert.per_i) buffer << "i " << s.i << " steps " << s.steps << '\n';
      }
    } else if (runs->parsed()) {
      const Exponent e = parse_exponent(e_text);
      const Natural p = parse_natural(p_text);
      const std::uint64_t m_max = parse_u64(m_text, "--max-m");
      const std::uint64_t floor = parse_u64(floor_text, "--floor");
      if (floor != 1 && floor != 2) throw ParseError("--floor must be 1 or 2");
      if (m_max < 1) throw ParseError("--max-m must be at least 1");
      const std::uint64_t cap = cap_text.empty() ? 10'000'000 : parse_u64(cap_text, "--cap");
      const AttractorAtlas atlas = AttractorAtlas::build(e);
      const RunSearch search = smallest_runs(e, p, m_max, floor, cap, atlas);
      if (report_format) {
        buffer << emit_report(search.runs, *report_format);
      } else {
        for (const RunRecord& r : search.runs) buffer << "m " << r.m << " start " << r.start << '\n';
      }
      if (!search.complete) {
        out << buffer.str();
        throw IterationCapExceeded("search cap " + std::to_string(cap) + " reached after m=" +
                                   std::to_string(search.runs.size()));
      }
    } else if (dens->parsed()) {
      const Exponent e = parse_exponent(e_text);
      const std::uint64_t upper = parse_u64(upper_text, "--upper");
      if (upper < 1) throw ParseError("--upper must be at least 1");
      DensityOptions options{threads, 0};
      if (!partitions_text.empty()) {
        const std::uint64_t parts = parse_u64(partitions_text, "--partitions");
        if (parts < 1 || parts > 1'000'000) throw ParseError("--partitions must be between 1 and 1000000");
        options.partitions = static_cast<unsigned>(parts);
      }
      const AttractorAtlas atlas = AttractorAtlas::build(e);
      const DensityReport report = density(e, upper, atlas, options);
      if (report_format) {
        buffer << emit_report(report, *report_format);
      } else {
        buffer << "e " << e.value() << " interval [1, " << upper << "]\n";
        for (std::size_t row = 0; row < report.counts.size(); ++row) {
          const auto [num, den] = report.proportion(row);
          buffer << detail::describe(report.counts[row].first) << " count " << report.counts[row].second
                 << " proportion " << num << '/' << den << " = " << detail::decimal(num, den) << '\n';
        }
      }
    }
  } catch (const Error& e) {
    const bool usage = dynamic_cast<const ParseError*>(&e) || dynamic_cast<const PreconditionViolated*>(&e) ||
                       dynamic_cast<const InvalidRepresentation*>(&e);
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    err << "facthappy: " << e.kind() << ": " << message << '\n';
    return usage ? kUsage : kFailure;
  }
  out << buffer.str();
  return kOk;
}

}  // namespace facthappy::cli
