#pragma once

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dacurv/exec.hpp"
#include "dacurv/module_spec.hpp"

namespace dacurv::cli {

inline constexpr int kSpecVersion = 1;

/// Test hook: perturbs a computed asymptotic sequence before its
/// monotonicity check, so the exit-code path for an inconsistency can be
/// exercised from a fixture file.
struct FaultInjection {
  std::string sequence;  // "K_m" or "chi_m"
  int at_m = 0;
  int delta = 0;
};

/// Optional run parameters. The same fields come from the spec file's
/// settings block and from command-line flags; flags win.
struct Settings {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> tol;
  std::optional<int> cutoff;
  std::optional<std::pair<int, int>> m_range;
  std::optional<std::vector<double>> r_grid;
  std::optional<int> sphere_samples;
  std::optional<std::vector<int>> trace_grid;
  std::optional<int> d0;
  std::optional<std::vector<int>> m_values;
  std::optional<std::vector<int>> cutoffs;
  std::optional<FaultInjection> inject;

  /// Fields set in o replace those of this.
  void merge(const Settings& o);
};

struct SpecFile {
  int version = kSpecVersion;
  ModuleSpec module;
  Settings settings;
};

/// YAML document with keys version, ambient {d: integer | omega}, N,
/// generators (list of N-tuples of polynomial strings) and optional settings.
/// Malformed input and unknown keys throw ParseError with a line and column.
SpecFile parse_spec_file(const std::string& text);
SpecFile load_spec_file(const std::string& path);
/// Normalized YAML; parse(serialize(s)) serializes to the same text.
std::string serialize_spec_file(const SpecFile& spec);
nlohmann::json spec_to_json(const SpecFile& spec);

/// "a..b" or a single integer.
std::pair<int, int> parse_m_range(const std::string& text);

inline const std::vector<std::string> kSubcommands = {"fiber-dim",  "curvature", "euler",         "gbc-check",
                                                      "asymptotic", "section5",  "defect-growth", "lemma61-check"};

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitInconsistent = 4;

struct RunOutcome {
  int exit_code = kExitOk;
  /// Keys: tool, subcommand, spec, parameters, results, verdicts, pass, timings.
  /// Everything outside "timings" is a deterministic function of spec and seed.
  nlohmann::json report;
  std::string summary;
};

/// Dispatches to the engine for `subcommand`. Engine exceptions propagate.
RunOutcome run(const std::string& subcommand, const SpecFile& spec, const Settings& overrides,
               Exec exec = Exec::Parallel);

/// Indented key: value rendering of a report.
std::string render_text(const nlohmann::json& report);

/// Full command line front end; returns the process exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dacurv::cli
