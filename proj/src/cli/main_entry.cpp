#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <ostream>

#include "dacurv/cli.hpp"
#include "dacurv/errors.hpp"

namespace dacurv::cli {

namespace {

std::vector<double> parse_r_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw InputError("r grid entries must be numbers: " + text);
    }
  }
  if (out.empty()) throw InputError("empty r grid");
  return out;
}

struct Flags {
  std::string spec_path;
  std::string out_path;
  std::string format = "json";
  bool serial = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> tol;
  std::optional<int> cutoff;
  std::optional<std::string> m_range;
  std::optional<std::string> r_grid;
  std::optional<int> sphere_samples;

  Settings settings() const {
    Settings s;
    s.seed = seed;
    s.trials = trials;
    s.tol = tol;
    s.cutoff = cutoff;
    if (m_range) s.m_range = parse_m_range(*m_range);
    if (r_grid) s.r_grid = parse_r_grid(*r_grid);
    s.sphere_samples = sphere_samples;
    return s;
  }
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("spec", f.spec_path, "Module spec file (YAML)")->required();
  sub->add_option("--seed", f.seed, "Seed of the single random generator");
  sub->add_option("--trials", f.trials, "Sample points for generic ranks")->check(CLI::PositiveNumber);
  sub->add_option("--tol", f.tol, "Relative singular value threshold for generic ranks")->check(CLI::PositiveNumber);
  sub->add_option("--cutoff", f.cutoff, "Degree cutoff (Hilbert degree, lemma61 cutoff, top growth cutoff)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--m-range,--m", f.m_range, "Variable counts a..b");
  sub->add_option("--r-grid", f.r_grid, "Comma separated radii for the radial extrapolation");
  sub->add_option("--sphere-samples", f.sphere_samples, "Monte Carlo sphere samples")->check(CLI::PositiveNumber);
  sub->add_option("--out", f.out_path, "Write the report here instead of stdout");
  sub->add_option("--format", f.format, "Report format")->check(CLI::IsMember({"json", "text"}));
  sub->add_flag("--serial", f.serial, "Use the serial reference kernels");
}

std::string format_report(const nlohmann::json& report, const std::string& format) {
  return format == "text" ? render_text(report) : report.dump(2) + "\n";
}

}  // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curvature invariant, Euler characteristic and fiber dimension of Drury-Arveson quotient modules"};
  app.require_subcommand(1);
  Flags flags;
  const std::map<std::string, std::string> about = {
      {"fiber-dim", "Generic fiber dimension of the submodule and the closed-form curvature"},
      {"curvature", "Curvature by radial extrapolation of sphere integrals, checked against the closed form"},
      {"euler", "Euler characteristic by module rank, Hilbert growth and operator ranks"},
      {"gbc-check", "Compare curvature and Euler characteristic across every method"},
      {"asymptotic", "K_m and chi_m over a range of variable counts"},
      {"section5", "Truncated distance against the lower bound for the single generator"},
      {"defect-growth", "Rank growth of the quotient defect over increasing cutoffs"},
      {"lemma61-check", "Two assemblies of the quotient defect operator agree"}};
  for (const auto& name : kSubcommands) add_flags(app.add_subcommand(name, about.at(name)), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  auto emit = [&](const nlohmann::json& report) {
    std::string text = format_report(report, flags.format);
    if (flags.out_path.empty()) {
      out << text;
      return;
    }
    std::ofstream f(flags.out_path);
    if (!f) throw InputError("cannot write " + flags.out_path);
    f << text;
  };
  auto fail = [&](int code, const std::string& kind, const std::string& message, const ParseError* pe) {
    nlohmann::json e = {{"kind", kind}, {"message", message}};
    if (pe) {
      e["line"] = pe->line();
      e["column"] = pe->column();
    }
    err << "error (" << kind << "): " << message << "\n";
    try {
      emit({{"tool", "dacurv"}, {"subcommand", subcommand}, {"error", e}, {"pass", false}});
    } catch (const std::exception& w) {
      err << "error: " << w.what() << "\n";
    }
    return code;
  };

  try {
    SpecFile spec = load_spec_file(flags.spec_path);
    RunOutcome r = run(subcommand, spec, flags.settings(), flags.serial ? Exec::Serial : Exec::Parallel);
    emit(r.report);
    err << r.summary;
    return r.exit_code;
  } catch (const ParseError& e) {
    return fail(kExitParse, "parse", e.what(), &e);
  } catch (const InputError& e) {
    return fail(kExitInput, "input", e.what(), nullptr);
  } catch (const InconsistencyError& e) {
    return fail(kExitInconsistent, "inconsistency", e.what(), nullptr);
  }
}

}  // namespace dacurv::cli
