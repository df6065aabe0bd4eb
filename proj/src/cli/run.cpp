#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "dacurv/cli.hpp"
#include "dacurv/errors.hpp"
#include "dacurv/experiments.hpp"
#include "dacurv/invariants.hpp"

namespace dacurv::cli {

using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

// Keeps per-stage wall-clock times out of the deterministic part of the report.
class Timer {
 public:
  template <class F>
  auto time(const std::string& stage, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record(stage, t0);
    } else {
      auto r = f();
      record(stage, t0);
      return r;
    }
  }
  json to_json() const { return stages_; }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point t0) {
    stages_[stage + "_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  json stages_ = json::object();
};

struct Context {
  const SpecFile& spec;
  Settings s;
  Exec exec;
  Rng rng;
  Timer timer;
  json results = json::object();
  json verdicts = json::array();
  std::ostringstream summary;

  void verdict(const std::string& name, bool pass, const std::string& detail) {
    verdicts.push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
    summary << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  }

  GenericRankOptions rank_opts(bool exact = false) const {
    GenericRankOptions o;
    if (s.trials) o.trials = *s.trials;
    if (s.tol) o.tol = *s.tol;
    o.max_trials = std::max(o.max_trials, o.trials);
    o.exact_confirm = exact;
    return o;
  }

  IntegralOptions integral_opts() const {
    IntegralOptions o;
    if (s.sphere_samples) o.sphere_samples = *s.sphere_samples;
    if (s.r_grid) o.r_grid = *s.r_grid;
    if (s.cutoff) o.ungraded_cutoff = *s.cutoff;
    o.exec = exec;
    return o;
  }

  std::vector<int> m_list(int lo_default, int hi_default) const {
    if (s.m_values) return *s.m_values;
    auto [lo, hi] = s.m_range.value_or(std::make_pair(lo_default, hi_default));
    std::vector<int> out;
    for (int m = lo; m <= hi; ++m) out.push_back(m);
    return out;
  }
};

json with_tol(double value, double tolerance) { return {{"value", value}, {"tolerance", tolerance}}; }

json rank_json(const GenericRankResult& r) {
  return {{"value", r.rank},
          {"trials_used", r.trials_used},
          {"attainment", with_tol(r.attainment, 0.0)},
          {"confident", r.confident},
          {"exact_confirmed", r.exact_confirmed},
          {"sampled_ranks", r.sampled_ranks}};
}

json certificate_json(const DependenceCertificate& c, double residual) {
  json j = {{"available", c.available}, {"subset", c.subset}};
  if (!c.available) {
    j["reason"] = c.reason;
    return j;
  }
  json comb = json::array();
  for (const auto& [g, p] : c.combination) comb.push_back({{"generator", g}, {"coefficient", p.to_string()}});
  j["combination"] = comb;
  j["witness"] = c.witness.to_string();
  j["construction_case"] = c.construction_case;
  j["checks"] = {{"support", c.support_check}, {"combination", c.combination_check}, {"nonzero", c.nonzero_check}};
  j["quotient_residual"] = with_tol(residual, 1e-8);
  return j;
}

json integral_json(const CurvatureEstimate& e, double tolerance) {
  return {{"value", e.estimate},
          {"std_error", e.std_error},
          {"systematic", e.systematic},
          {"uncertainty", e.uncertainty},
          {"tolerance", tolerance},
          {"extrapolation_residual", e.extrapolation_residual},
          {"depth", e.depth},
          {"samples", e.samples},
          {"r_used", e.r_used},
          {"r_dropped", e.r_dropped},
          {"approximate", e.approximate}};
}

json hilbert_json(const HilbertEuler& h) {
  return {{"chi", h.chi},
          {"stabilized", h.stabilized},
          {"stabilization_degree", h.stabilization_degree},
          {"cutoff", h.cutoff},
          {"dims", h.dims},
          {"differences", h.differences},
          {"approximate", h.approximate}};
}

json trace_json(const TraceEstimate& t, double tolerance) {
  return {{"value", t.estimate},
          {"uncertainty", t.uncertainty},
          {"tolerance", tolerance},
          {"fit_residual", t.fit_residual},
          {"slope", t.slope},
          {"n_grid", t.n_grid},
          {"cumulative_ratio", t.cumulative_ratio},
          {"last_ratio", t.last_ratio},
          {"approximate", t.approximate}};
}

json asymptotic_json(const AsymptoticReport& r) {
  json j = {{"m", r.m_values},         {"K_m", r.K_m},
            {"chi_m", r.chi_m},        {"K_monotone", r.K_monotone},
            {"chi_monotone", r.chi_monotone}, {"K_le_chi", r.K_le_chi}};
  j["K_limit"] = r.K_limit ? json(*r.K_limit) : json(nullptr);
  j["chi_limit"] = r.chi_limit ? json(*r.chi_limit) : json(nullptr);
  return j;
}

const Polynomial& single_generator(const ModuleSpec& m, const char* what) {
  if (m.N != 1 || m.generators.size() != 1)
    throw InputError(std::string(what) + " needs N = 1 and exactly one generator");
  return m.generators.front()[0];
}

void run_fiber_dim(Context& c) {
  auto fd = c.timer.time("fiber_dimension", [&] { return fiber_dimension(c.spec.module, c.rng, c.rank_opts()); });
  c.results["N"] = c.spec.module.N;
  c.results["fd"] = rank_json(fd);
  c.verdict("fd_confident", fd.confident || fd.exact_confirmed,
            "fd = " + std::to_string(fd.rank) + " attained at " + std::to_string(fd.trials_used) + " sampled points");
}

void run_curvature(Context& c) {
  auto closed = c.timer.time("closed_form",
                             [&] { return curvature_closed_form(c.spec.module, c.rng, c.rank_opts(true)); });
  auto integral = c.timer.time("integral", [&] { return curvature_by_integral(c.spec.module, c.rng, c.integral_opts()); });
  double tol = std::max(0.1, 3 * integral.uncertainty);
  c.results["K_closed"] = {{"value", closed.K}, {"fd", rank_json(closed.fd)}};
  c.results["K_integral"] = integral_json(integral, tol);
  std::ostringstream d;
  d << "K_integral = " << integral.estimate << " +- " << integral.uncertainty << " vs K_closed = " << closed.K;
  c.verdict("integral_matches_closed_form", std::abs(integral.estimate - closed.K) <= tol, d.str());
}

void run_euler(Context& c) {
  const auto& m = c.spec.module;
  auto mr = c.timer.time("module_rank", [&] { return euler_char_module_rank(m, c.rng, c.rank_opts(true)); });
  int hdeg = c.s.cutoff.value_or(std::max(8, static_cast<int>(m.num_vars()) + m.max_degree() + 4));
  auto hil = c.timer.time("hilbert", [&] { return euler_char_hilbert_growth(m, hdeg, c.exec); });
  auto opr = c.timer.time("oprank", [&] { return euler_char_oprank(m, hdeg, c.exec); });
  json cert = mr.certificate ? certificate_json(*mr.certificate, mr.certificate_residual) : json(nullptr);
  c.results["chi_rank"] = {{"value", mr.chi}, {"subset", mr.subset.subset}, {"certificate", cert}};
  c.results["chi_hilbert"] = hilbert_json(hil);
  c.results["chi_oprank"] = hilbert_json(opr);
  bool cert_ok = !mr.certificate || (mr.certificate->available && mr.certificate_residual <= 1e-8);
  c.verdict("certificate_verified", cert_ok, mr.certificate ? "dependence certificate checked exactly" : "fd = N, nothing to certify");
  auto growth_detail = [&](const char* name, const HilbertEuler& h) {
    std::string d = std::string(name) + " = " + std::to_string(h.chi) + ", chi_rank = " + std::to_string(mr.chi);
    if (!h.stabilized) d += " (not stabilized by degree " + std::to_string(hdeg) + ")";
    return d;
  };
  c.verdict("chi_hilbert_equals_chi_rank", hil.stabilized && hil.chi == mr.chi, growth_detail("chi_hilbert", hil));
  c.verdict("chi_oprank_equals_chi_rank", opr.stabilized && opr.chi == mr.chi, growth_detail("chi_oprank", opr));
  c.verdict("oprank_equals_enumeration", hil.dims == opr.dims, "dim M_k by operator rank and by enumeration");
}

void run_gbc(Context& c) {
  GbcOptions o;
  o.rank = c.rank_opts();
  o.integral = c.integral_opts();
  if (c.s.cutoff) o.hilbert_degree = *c.s.cutoff;
  if (c.s.trace_grid) o.trace_grid = *c.s.trace_grid;
  auto rep = c.timer.time("gbc_check", [&] { return gbc_check(c.spec.module, c.rng, o); });
  auto& r = c.results;
  r["N"] = rep.N;
  r["fd"] = rep.fd;
  r["K_closed"] = rep.K_closed;
  json cert = rep.module_rank.certificate
                  ? certificate_json(*rep.module_rank.certificate, rep.module_rank.certificate_residual)
                  : json(nullptr);
  r["chi_rank"] = {{"value", rep.chi_rank}, {"subset", rep.module_rank.subset.subset}, {"certificate", cert}};
  r["chi_hilbert"] = hilbert_json(rep.hilbert);
  r["chi_oprank"] = hilbert_json(rep.oprank);
  if (rep.integral) r["K_integral"] = integral_json(*rep.integral, std::max(0.1, 3 * rep.integral->uncertainty));
  r["K_trace"] = trace_json(rep.trace, std::max(0.1, 3 * rep.trace.uncertainty));
  r["stages"] = asymptotic_json(rep.stages);
  r["K"] = rep.K_closed;
  r["chi"] = rep.chi_rank;
  r["equal"] = rep.gbc_equal;
  r["failures"] = rep.failures;
  c.verdict("gbc_equal", rep.gbc_equal,
            "K = " + std::to_string(rep.K_closed) + ", chi = " + std::to_string(rep.chi_rank));
  std::string detail = "all computation paths agree";
  if (!rep.failures.empty()) {
    detail.clear();
    for (const auto& f : rep.failures) detail += (detail.empty() ? "" : "; ") + f;
  }
  c.verdict("paths_consistent", rep.consistent, detail);
}

void run_asymptotic(Context& c) {
  const auto& m = c.spec.module;
  int hi = m.kind == AmbientKind::Finite ? static_cast<int>(m.d) : static_cast<int>(m.max_active_variable()) + 2;
  auto ms = c.m_list(1, hi);
  auto rep = c.timer.time("asymptotic", [&] { return asymptotic_sequences(m, ms, c.rng, c.rank_opts(true)); });
  if (c.s.inject) {
    const auto& f = *c.s.inject;
    auto it = std::find(rep.m_values.begin(), rep.m_values.end(), f.at_m);
    if (it == rep.m_values.end()) throw InputError("inject.at_m is not in the m range");
    auto idx = static_cast<std::size_t>(it - rep.m_values.begin());
    (f.sequence == "K_m" ? rep.K_m : rep.chi_m)[idx] += f.delta;
    c.results["injected"] = {{"sequence", f.sequence}, {"at_m", f.at_m}, {"delta", f.delta}};
    finalize_asymptotic(rep);
  }
  c.results["table"] = asymptotic_json(rep);
  c.verdict("K_m_nonincreasing", rep.K_monotone, "K_m over m = " + std::to_string(ms.front()) + ".." + std::to_string(ms.back()));
  c.verdict("chi_m_nonincreasing", rep.chi_monotone, "chi_m over the same range");
  c.verdict("K_m_le_chi_m", rep.K_le_chi, "K_m <= chi_m at every m");
}

void run_section5(Context& c) {
  Section5Config cfg;
  cfg.q = single_generator(c.spec.module, "section5");
  cfg.n = cfg.q.degree();
  cfg.d0 = c.s.d0.value_or(cfg.n + 1);
  if (c.s.m_values)
    cfg.m_values = *c.s.m_values;
  else if (c.s.m_range)
    cfg.m_values = c.m_list(0, 0);
  auto res = c.timer.time("section5", [&] { return section5_bound_check(cfg); });
  json rows = json::array();
  for (const auto& row : res.rows) {
    json j = {{"m", row.m}, {"unknowns", row.unknowns}, {"exact", row.exact}, {"pass", row.pass}};
    j["distance2"] = {{"value", row.distance2_value}, {"tolerance", row.exact ? 0.0 : 1e-12}};
    if (row.exact) j["distance2"]["rational"] = row.distance2.get_str();
    rows.push_back(j);
  }
  c.results["q"] = res.q.to_string();
  c.results["n"] = cfg.n;
  c.results["d0"] = cfg.d0;
  c.results["q_norm2"] = res.q_norm2.get_str();
  c.results["bound"] = {{"rational", res.bound.get_str()}, {"value", res.bound.get_d()}, {"tolerance", 0.0}};
  c.results["rows"] = rows;
  c.results["nondecreasing_in_m"] = res.nondecreasing;
  c.results["note"] =
      "f is truncated to m variables; for n = 1 the truncated distance increases with m to the untruncated one, "
      "so each passing row also bounds the untruncated distance";
  for (const auto& row : res.rows) {
    std::ostringstream d;
    d << "m = " << row.m << ": distance^2 = " << row.distance2_value << " >= bound = " << res.bound.get_d();
    c.verdict("bound_m" + std::to_string(row.m), row.pass, d.str());
  }
}

std::vector<int> growth_cutoffs(const Context& c) {
  if (c.s.cutoffs) return *c.s.cutoffs;
  int top = c.s.cutoff.value_or(6);
  std::vector<int> out;
  for (int k = 2; k <= top; ++k) out.push_back(k);
  return out;
}

void run_defect_growth(Context& c) {
  const Polynomial& f = single_generator(c.spec.module, "defect-growth");
  auto cutoffs = growth_cutoffs(c);
  std::vector<int> ms = (c.s.m_values || c.s.m_range) ? c.m_list(0, 0) : std::vector<int>{0};
  json tables = json::array();
  for (int m : ms) {
    auto g = c.timer.time("growth_m" + std::to_string(m),
                          [&] { return defect_rank_growth(f, cutoffs, static_cast<std::uint32_t>(m), c.exec); });
    json rows = json::array();
    std::vector<std::size_t> ranks;
    for (const auto& r : g.rows) {
      rows.push_back({{"cutoff", r.cutoff},
                      {"rank", r.rank},
                      {"zone_dim", r.zone_dim},
                      {"assembly_difference", with_tol(r.max_difference, 1e-10)}});
      ranks.push_back(r.rank);
    }
    tables.push_back({{"m", g.m_vars},
                      {"rows", rows},
                      {"nondecreasing", g.nondecreasing},
                      {"grows_in_every_window", g.grows_in_every_window},
                      {"constant", g.constant},
                      {"rank_tolerance", kDefectRankTol}});
    std::string seq;
    for (auto r : ranks) seq += (seq.empty() ? "" : ",") + std::to_string(r);
    std::string tag = "m" + std::to_string(g.m_vars);
    if (f.is_constant()) {
      bool ok = std::all_of(ranks.begin(), ranks.end(), [](std::size_t r) { return r == 1; });
      c.verdict("rank_identically_one_" + tag, ok, "ranks " + seq);
    } else {
      c.verdict("rank_grows_" + tag, g.nondecreasing && g.grows_in_every_window, "ranks " + seq);
    }
  }
  c.results["f"] = f.to_string();
  c.results["N_f"] = order_of_vanishing(f);
  c.results["tables"] = tables;
}

void run_lemma61(Context& c) {
  const auto& m = c.spec.module;
  int min_cutoff = m.max_degree() + 2;
  int cutoff = c.s.cutoff.value_or(std::max(4, min_cutoff));
  if (cutoff < min_cutoff) throw InputError("lemma61-check needs cutoff >= generator degree + 2");
  auto a = c.timer.time("assemblies", [&] { return defect_squared_submodule(m, m.num_vars(), cutoff, c.exec); });
  c.results["cutoff"] = cutoff;
  c.results["m"] = m.num_vars();
  c.results["exact_degree"] = a.exact_degree;
  c.results["zone_dim"] = a.zone.size();
  c.results["contaminated"] = a.contaminated;
  c.results["assembly_difference"] = with_tol(a.max_difference, 1e-10);
  c.results["min_eigenvalue"] = with_tol(a.min_eigenvalue, 1e-10);
  c.results["grading_error"] = with_tol(a.grading_error, 1e-12);
  c.results["rank"] = {{"value", a.rank}, {"relative_tolerance", kDefectRankTol}};
  std::ostringstream d;
  d << "max entry difference " << a.max_difference;
  c.verdict("assemblies_agree", a.max_difference <= 1e-10, d.str());
  std::ostringstream e;
  e << "smallest eigenvalue " << a.min_eigenvalue;
  c.verdict("positive_semidefinite", a.min_eigenvalue >= -1e-10, e.str());
  if (!a.contaminated)
    c.verdict("grading_commutes", a.grading_error <= 1e-12, "E_k P_M - P_M E_k on the zone");
}

json parameters_json(const Context& c, std::uint64_t seed) {
  json p = spec_to_json(SpecFile{kSpecVersion, c.spec.module, c.s}).value("settings", json::object());
  p["seed"] = seed;
  p["exec"] = c.exec == Exec::Serial ? "serial" : "parallel";
  return p;
}

}  // namespace

RunOutcome run(const std::string& subcommand, const SpecFile& spec, const Settings& overrides, Exec exec) {
  static const std::map<std::string, std::function<void(Context&)>> table = {
      {"fiber-dim", run_fiber_dim},   {"curvature", run_curvature},       {"euler", run_euler},
      {"gbc-check", run_gbc},         {"asymptotic", run_asymptotic},     {"section5", run_section5},
      {"defect-growth", run_defect_growth}, {"lemma61-check", run_lemma61}};
  auto it = table.find(subcommand);
  if (it == table.end()) throw InputError("unknown subcommand " + subcommand);
  spec.module.validate();

  Settings s = spec.settings;
  s.merge(overrides);
  const std::uint64_t seed = s.seed.value_or(kDefaultSeed);
  Context c{spec, s, exec, Rng(seed), {}, json::object(), json::array(), {}};

  auto t0 = std::chrono::steady_clock::now();
  it->second(c);
  double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  RunOutcome out;
  bool pass = std::all_of(c.verdicts.begin(), c.verdicts.end(), [](const json& v) { return v["pass"].get<bool>(); });
  json timings = c.timer.to_json();
  timings["total_s"] = total;
  out.report = {{"tool", "dacurv"},
                {"subcommand", subcommand},
                {"spec", spec_to_json(spec)},
                {"parameters", parameters_json(c, seed)},
                {"results", c.results},
                {"verdicts", c.verdicts},
                {"pass", pass},
                {"timings", timings}};
  out.exit_code = pass ? kExitOk : kExitInconsistent;
  out.summary = c.summary.str();
  return out;
}

namespace {

void render(const json& j, int indent, std::ostream& os) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_structured() && !v.empty() &&
          !(v.is_array() && std::none_of(v.begin(), v.end(), [](const json& e) { return e.is_structured(); }))) {
        os << pad << k << ":\n";
        render(v, indent + 2, os);
      } else {
        os << pad << k << ": " << v.dump() << "\n";
      }
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (v.is_structured()) {
        os << pad << "-\n";
        render(v, indent + 2, os);
      } else {
        os << pad << "- " << v.dump() << "\n";
      }
    }
  } else {
    os << pad << j.dump() << "\n";
  }
}

}  // namespace

std::string render_text(const json& report) {
  std::ostringstream os;
  render(report, 0, os);
  return os.str();
}

}  // namespace dacurv::cli
