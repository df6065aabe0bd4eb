#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "dacurv/cli.hpp"
#include "dacurv/errors.hpp"
#include "dacurv/poly_parse.hpp"

namespace dacurv::cli {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
  const YAML::Mark m = node.Mark();
  // yaml-cpp marks are 0-based and -1 for nodes built in memory.
  std::size_t line = m.line >= 0 ? static_cast<std::size_t>(m.line) + 1 : 0;
  std::size_t col = m.column >= 0 ? static_cast<std::size_t>(m.column) + 1 : 0;
  throw ParseError(what + " at line " + std::to_string(line) + ", column " + std::to_string(col), line, col);
}

void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
  if (!map.IsMap()) fail(map, where + " must be a mapping");
  for (const auto& kv : map) {
    auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + " must be a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, what + " has the wrong type");
  }
}

template <class T>
std::vector<T> scalar_list(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence()) fail(n, what + " must be a list");
  std::vector<T> out;
  for (const auto& e : n) out.push_back(scalar<T>(e, what + " entry"));
  return out;
}

Polynomial parse_poly_node(const YAML::Node& n) {
  if (!n.IsScalar()) fail(n, "polynomial must be a string");
  const YAML::Mark m = n.Mark();
  // Quoted scalars carry the "!" tag and their mark sits on the quote.
  std::size_t offset = static_cast<std::size_t>(std::max(0, m.column)) + (n.Tag() == "!" ? 1 : 0);
  return parse_polynomial(n.Scalar(), static_cast<std::size_t>(std::max(0, m.line)) + 1, offset);
}

Settings parse_settings(const YAML::Node& s) {
  check_keys(s,
             {"seed", "trials", "tol", "cutoff", "m_range", "r_grid", "sphere_samples", "trace_grid", "d0",
              "m_values", "cutoffs", "inject"},
             "settings");
  Settings out;
  if (s["seed"]) out.seed = scalar<std::uint64_t>(s["seed"], "seed");
  if (s["trials"]) out.trials = scalar<int>(s["trials"], "trials");
  if (s["tol"]) out.tol = scalar<double>(s["tol"], "tol");
  if (s["cutoff"]) out.cutoff = scalar<int>(s["cutoff"], "cutoff");
  if (s["m_range"]) {
    const auto& n = s["m_range"];
    if (n.IsSequence()) {
      auto v = scalar_list<int>(n, "m_range");
      if (v.size() != 2) fail(n, "m_range needs two entries");
      out.m_range = std::make_pair(v[0], v[1]);
    } else {
      try {
        out.m_range = parse_m_range(scalar<std::string>(n, "m_range"));
      } catch (const InputError& e) {
        fail(n, e.what());
      }
    }
  }
  if (s["r_grid"]) out.r_grid = scalar_list<double>(s["r_grid"], "r_grid");
  if (s["sphere_samples"]) out.sphere_samples = scalar<int>(s["sphere_samples"], "sphere_samples");
  if (s["trace_grid"]) out.trace_grid = scalar_list<int>(s["trace_grid"], "trace_grid");
  if (s["d0"]) out.d0 = scalar<int>(s["d0"], "d0");
  if (s["m_values"]) out.m_values = scalar_list<int>(s["m_values"], "m_values");
  if (s["cutoffs"]) out.cutoffs = scalar_list<int>(s["cutoffs"], "cutoffs");
  if (s["inject"]) {
    const auto& n = s["inject"];
    check_keys(n, {"sequence", "at_m", "delta"}, "inject");
    FaultInjection f;
    if (!n["sequence"] || !n["at_m"] || !n["delta"]) fail(n, "inject needs sequence, at_m and delta");
    f.sequence = scalar<std::string>(n["sequence"], "inject.sequence");
    if (f.sequence != "K_m" && f.sequence != "chi_m") fail(n["sequence"], "inject.sequence must be K_m or chi_m");
    f.at_m = scalar<int>(n["at_m"], "inject.at_m");
    f.delta = scalar<int>(n["delta"], "inject.delta");
    out.inject = f;
  }
  return out;
}

}  // namespace

void Settings::merge(const Settings& o) {
  auto take = [](auto& dst, const auto& src) {
    if (src) dst = src;
  };
  take(seed, o.seed);
  take(trials, o.trials);
  take(tol, o.tol);
  take(cutoff, o.cutoff);
  take(m_range, o.m_range);
  take(r_grid, o.r_grid);
  take(sphere_samples, o.sphere_samples);
  take(trace_grid, o.trace_grid);
  take(d0, o.d0);
  take(m_values, o.m_values);
  take(cutoffs, o.cutoffs);
  take(inject, o.inject);
}

std::pair<int, int> parse_m_range(const std::string& text) {
  auto dots = text.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      int v = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {v, v};
    }
    std::string a = text.substr(0, dots), b = text.substr(dots + 2);
    int lo = std::stoi(a, &used);
    if (used != a.size()) throw std::invalid_argument(text);
    int hi = std::stoi(b, &used);
    if (used != b.size()) throw std::invalid_argument(text);
    if (lo < 1 || hi < lo) throw InputError("m range must satisfy 1 <= a <= b: " + text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw InputError("m range must look like a..b: " + text);
  }
}

SpecFile parse_spec_file(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg + " at line " + std::to_string(e.mark.line + 1) + ", column " +
                         std::to_string(e.mark.column + 1),
                     static_cast<std::size_t>(e.mark.line + 1), static_cast<std::size_t>(e.mark.column + 1));
  }
  if (!root || root.IsNull()) throw ParseError("empty spec file", 1, 1);
  check_keys(root, {"version", "ambient", "N", "generators", "settings"}, "spec");
  for (const char* k : {"version", "ambient", "N", "generators"})
    if (!root[k]) fail(root, std::string("missing key '") + k + "'");

  SpecFile out;
  out.version = scalar<int>(root["version"], "version");
  if (out.version != kSpecVersion) fail(root["version"], "unsupported spec version " + std::to_string(out.version));

  const auto& amb = root["ambient"];
  check_keys(amb, {"d"}, "ambient");
  if (!amb["d"]) fail(amb, "ambient needs d");
  auto dtext = scalar<std::string>(amb["d"], "ambient.d");
  if (dtext == "omega") {
    out.module.kind = AmbientKind::Omega;
  } else {
    out.module.kind = AmbientKind::Finite;
    int d = scalar<int>(amb["d"], "ambient.d");
    if (d < 1) fail(amb["d"], "ambient.d must be positive or omega");
    out.module.d = static_cast<std::uint32_t>(d);
  }

  int N = scalar<int>(root["N"], "N");
  if (N < 1) fail(root["N"], "N must be positive");
  out.module.N = static_cast<std::size_t>(N);

  const auto& gens = root["generators"];
  if (!gens.IsSequence()) fail(gens, "generators must be a list");
  for (const auto& g : gens) {
    if (!g.IsSequence()) fail(g, "each generator must be a list of N polynomials");
    if (g.size() != out.module.N)
      fail(g, "generator has " + std::to_string(g.size()) + " components, expected " + std::to_string(N));
    std::vector<Polynomial> comps;
    for (const auto& c : g) comps.push_back(parse_poly_node(c));
    out.module.generators.emplace_back(std::move(comps));
  }
  if (root["settings"]) out.settings = parse_settings(root["settings"]);
  return out;
}

SpecFile load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open spec file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec_file(ss.str());
}

nlohmann::json spec_to_json(const SpecFile& spec) {
  using nlohmann::json;
  json j;
  j["version"] = spec.version;
  if (spec.module.kind == AmbientKind::Omega)
    j["ambient"] = {{"d", "omega"}};
  else
    j["ambient"] = {{"d", spec.module.d}};
  j["N"] = spec.module.N;
  json gens = json::array();
  for (const auto& g : spec.module.generators) {
    json row = json::array();
    for (const auto& c : g.components()) row.push_back(c.to_string());
    gens.push_back(row);
  }
  j["generators"] = gens;
  const Settings& s = spec.settings;
  json st = json::object();
  if (s.seed) st["seed"] = *s.seed;
  if (s.trials) st["trials"] = *s.trials;
  if (s.tol) st["tol"] = *s.tol;
  if (s.cutoff) st["cutoff"] = *s.cutoff;
  if (s.m_range) st["m_range"] = std::to_string(s.m_range->first) + ".." + std::to_string(s.m_range->second);
  if (s.r_grid) st["r_grid"] = *s.r_grid;
  if (s.sphere_samples) st["sphere_samples"] = *s.sphere_samples;
  if (s.trace_grid) st["trace_grid"] = *s.trace_grid;
  if (s.d0) st["d0"] = *s.d0;
  if (s.m_values) st["m_values"] = *s.m_values;
  if (s.cutoffs) st["cutoffs"] = *s.cutoffs;
  if (s.inject) st["inject"] = {{"sequence", s.inject->sequence}, {"at_m", s.inject->at_m}, {"delta", s.inject->delta}};
  if (!st.empty()) j["settings"] = st;
  return j;
}

std::string serialize_spec_file(const SpecFile& spec) {
  YAML::Emitter e;
  e.SetDoublePrecision(15);
  e << YAML::BeginMap;
  e << YAML::Key << "version" << YAML::Value << spec.version;
  e << YAML::Key << "ambient" << YAML::Value << YAML::BeginMap << YAML::Key << "d" << YAML::Value;
  if (spec.module.kind == AmbientKind::Omega)
    e << "omega";
  else
    e << spec.module.d;
  e << YAML::EndMap;
  e << YAML::Key << "N" << YAML::Value << spec.module.N;
  e << YAML::Key << "generators" << YAML::Value << YAML::BeginSeq;
  for (const auto& g : spec.module.generators) {
    e << YAML::Flow << YAML::BeginSeq;
    for (const auto& c : g.components()) e << YAML::DoubleQuoted << c.to_string();
    e << YAML::EndSeq;
  }
  e << YAML::EndSeq;

  const Settings& s = spec.settings;
  nlohmann::json st = spec_to_json(spec).value("settings", nlohmann::json::object());
  if (!st.empty()) {
    e << YAML::Key << "settings" << YAML::Value << YAML::BeginMap;
    if (s.seed) e << YAML::Key << "seed" << YAML::Value << *s.seed;
    if (s.trials) e << YAML::Key << "trials" << YAML::Value << *s.trials;
    if (s.tol) e << YAML::Key << "tol" << YAML::Value << *s.tol;
    if (s.cutoff) e << YAML::Key << "cutoff" << YAML::Value << *s.cutoff;
    if (s.m_range) e << YAML::Key << "m_range" << YAML::Value << st["m_range"].get<std::string>();
    if (s.r_grid) e << YAML::Key << "r_grid" << YAML::Value << YAML::Flow << *s.r_grid;
    if (s.sphere_samples) e << YAML::Key << "sphere_samples" << YAML::Value << *s.sphere_samples;
    if (s.trace_grid) e << YAML::Key << "trace_grid" << YAML::Value << YAML::Flow << *s.trace_grid;
    if (s.d0) e << YAML::Key << "d0" << YAML::Value << *s.d0;
    if (s.m_values) e << YAML::Key << "m_values" << YAML::Value << YAML::Flow << *s.m_values;
    if (s.cutoffs) e << YAML::Key << "cutoffs" << YAML::Value << YAML::Flow << *s.cutoffs;
    if (s.inject) {
      e << YAML::Key << "inject" << YAML::Value << YAML::BeginMap;
      e << YAML::Key << "sequence" << YAML::Value << s.inject->sequence;
      e << YAML::Key << "at_m" << YAML::Value << s.inject->at_m;
      e << YAML::Key << "delta" << YAML::Value << s.inject->delta;
      e << YAML::EndMap;
    }
    e << YAML::EndMap;
  }
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace dacurv::cli
