#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dacurv/cli.hpp"
#include "dacurv/errors.hpp"

using namespace dacurv;
using namespace dacurv::cli;
namespace fs = std::filesystem;

namespace {

std::string spec_path(const std::string& name) { return std::string(DACURV_SPECS_DIR) + "/" + name; }

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dacurv");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path write_temp(const std::string& name, const std::string& text) {
  fs::path p = fs::temp_directory_path() / ("dacurv_test_" + name);
  std::ofstream(p) << text;
  return p;
}

nlohmann::json without_timings(nlohmann::json j) {
  j.erase("timings");
  return j;
}

const char* kExample = R"(version: 1
ambient: {d: 2}
N: 2
generators:
  - ["1", "z1"]
settings:
  seed: 3
)";

}  // namespace

TEST(SpecFile, ParsesExample) {
  auto s = parse_spec_file(kExample);
  EXPECT_EQ(s.module.N, 2u);
  EXPECT_EQ(s.module.d, 2u);
  EXPECT_EQ(s.module.kind, AmbientKind::Finite);
  ASSERT_EQ(s.module.generators.size(), 1u);
  EXPECT_EQ(s.module.generators[0][1].to_string(), "z1");
  EXPECT_EQ(*s.settings.seed, 3u);
}

TEST(SpecFile, OmegaAmbient) {
  auto s = parse_spec_file("version: 1\nambient: {d: omega}\nN: 1\ngenerators:\n  - [z3]\n");
  EXPECT_EQ(s.module.kind, AmbientKind::Omega);
  EXPECT_EQ(s.module.num_vars(), 3u);
}

TEST(SpecFile, UnknownKeysRejectedWithPosition) {
  try {
    parse_spec_file(std::string(kExample) + "colour: blue\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 8u);
    EXPECT_EQ(e.column(), 1u);
  }
  EXPECT_THROW(parse_spec_file("version: 1\nambient: {d: 2, e: 1}\nN: 1\ngenerators: [[z1]]\n"), ParseError);
  EXPECT_THROW(parse_spec_file(std::string(kExample) + "  trails: 3\n"), ParseError);
}

TEST(SpecFile, PolynomialErrorsPointIntoTheFile) {
  try {
    parse_spec_file("version: 1\nambient: {d: 2}\nN: 2\ngenerators:\n  - [\"1\", \"z1^-2\"]\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
    // The bad exponent sits inside the second string, after column 13.
    EXPECT_GT(e.column(), 13u);
  }
}

TEST(SpecFile, StructuralErrors) {
  EXPECT_THROW(parse_spec_file("version: 1\nambient: {d: 2}\nN: 2\ngenerators:\n  - [\"1\"]\n"), ParseError);
  EXPECT_THROW(parse_spec_file("version: 2\nambient: {d: 2}\nN: 1\ngenerators: [[z1]]\n"), ParseError);
  EXPECT_THROW(parse_spec_file("version: 1\nN: 1\ngenerators: [[z1]]\n"), ParseError);
  EXPECT_THROW(parse_spec_file("version: 1\nambient: {d: two}\nN: 1\ngenerators: [[z1]]\n"), ParseError);
  EXPECT_THROW(parse_spec_file("version: [1\n"), ParseError);
  EXPECT_THROW(parse_spec_file(""), ParseError);
}

TEST(SpecFile, RoundTripIsIdempotent) {
  for (const char* name : {"graph_z1sq.yaml", "omega_injected.yaml", "distance_bound_d0_3.yaml", "constants.yaml"}) {
    auto first = serialize_spec_file(load_spec_file(spec_path(name)));
    auto second = serialize_spec_file(parse_spec_file(first));
    EXPECT_EQ(first, second) << name;
  }
  auto s = parse_spec_file(
      "version: 1\nambient: {d: 3}\nN: 2\ngenerators:\n  - [\"z2*z1 + 3/6\", \"-z3^2\"]\n"
      "settings: {r_grid: [0.7, 0.9], tol: 1e-9, m_range: [1, 3]}\n");
  auto text = serialize_spec_file(s);
  auto again = parse_spec_file(text);
  EXPECT_EQ(again.module.generators, s.module.generators);
  EXPECT_EQ(*again.settings.r_grid, *s.settings.r_grid);
  EXPECT_EQ(*again.settings.tol, *s.settings.tol);
  EXPECT_EQ(serialize_spec_file(again), text);
}

TEST(SpecFile, MRange) {
  EXPECT_EQ(parse_m_range("1..8"), std::make_pair(1, 8));
  EXPECT_EQ(parse_m_range("4"), std::make_pair(4, 4));
  EXPECT_THROW(parse_m_range("8..1"), InputError);
  EXPECT_THROW(parse_m_range("1-8"), InputError);
}

TEST(Cli, GbcCheckExample) {
  auto r = run_cli({"gbc-check", spec_path("graph_z1.yaml"), "--cutoff", "12"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["results"]["K"], 1);
  EXPECT_EQ(j["results"]["chi"], 1);
  EXPECT_EQ(j["results"]["equal"], true);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_TRUE(j.contains("timings"));
}

TEST(Cli, FiberDimOfConstants) {
  auto r = run_cli({"fiber-dim", spec_path("constants.yaml")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["results"]["fd"]["value"], 3);
  EXPECT_EQ(j["results"]["N"], 3);
}

TEST(Cli, AsymptoticTable) {
  auto r = run_cli({"asymptotic", spec_path("omega.yaml"), "--m", "1..8"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  auto K = j["results"]["table"]["K_m"].get<std::vector<int>>();
  ASSERT_EQ(K.size(), 8u);
  for (std::size_t i = 1; i < K.size(); ++i) EXPECT_LE(K[i], K[i - 1]);
}

TEST(Cli, InjectedNonMonotonicityExitsFour) {
  auto r = run_cli({"asymptotic", spec_path("omega_injected.yaml")});
  EXPECT_EQ(r.code, kExitInconsistent);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["error"]["kind"], "inconsistency");
}

TEST(Cli, ParseErrorExitsTwo) {
  auto p = write_temp("bad.yaml", "version: 1\nambient: {d: 2}\nN: 1\ngenerators:\n  - [\"z1 +* z2\"]\n");
  auto r = run_cli({"fiber-dim", p.string()});
  EXPECT_EQ(r.code, kExitParse);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["error"]["line"], 5);
  EXPECT_NE(r.err.find("parse"), std::string::npos);
  EXPECT_EQ(run_cli({"fiber-dim", spec_path("constants.yaml"), "--bogus"}).code, kExitParse);
  EXPECT_EQ(run_cli({"no-such-command", spec_path("constants.yaml")}).code, kExitParse);
}

TEST(Cli, PreconditionFailureExitsThree) {
  auto p = write_temp("range.yaml", "version: 1\nambient: {d: 1}\nN: 1\ngenerators:\n  - [\"z2\"]\n");
  auto r = run_cli({"fiber-dim", p.string()});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("z2"), std::string::npos);
  EXPECT_EQ(run_cli({"fiber-dim", "/nonexistent/spec.yaml"}).code, kExitInput);
  // section5 needs d0 > n.
  auto q = write_temp("s5.yaml", "version: 1\nambient: {d: omega}\nN: 1\ngenerators: [[\"z1\"]]\nsettings: {d0: 1}\n");
  EXPECT_EQ(run_cli({"section5", q.string()}).code, kExitInput);
}

TEST(Cli, DeterministicReports) {
  for (const char* sub : {"gbc-check", "curvature", "fiber-dim"}) {
    auto a = run_cli({sub, spec_path("graph_z1z2.yaml"), "--sphere-samples", "64"});
    auto b = run_cli({sub, spec_path("graph_z1z2.yaml"), "--sphere-samples", "64"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(without_timings(nlohmann::json::parse(a.out)).dump(), without_timings(nlohmann::json::parse(b.out)).dump())
        << sub;
  }
}

TEST(Cli, SerialAndParallelKernelsGiveTheSameReport) {
  auto a = run_cli({"gbc-check", spec_path("graph_z1sq.yaml"), "--sphere-samples", "64"});
  auto b = run_cli({"gbc-check", spec_path("graph_z1sq.yaml"), "--sphere-samples", "64", "--serial"});
  auto ja = without_timings(nlohmann::json::parse(a.out));
  auto jb = without_timings(nlohmann::json::parse(b.out));
  ja["parameters"].erase("exec");
  jb["parameters"].erase("exec");
  EXPECT_EQ(ja.dump(), jb.dump());
}

TEST(Cli, SeedChangesSampledQuantities) {
  auto a = run_cli({"curvature", spec_path("graph_z1.yaml"), "--sphere-samples", "32", "--seed", "1"});
  auto b = run_cli({"curvature", spec_path("graph_z1.yaml"), "--sphere-samples", "32", "--seed", "2"});
  auto va = nlohmann::json::parse(a.out)["results"]["K_integral"]["value"].get<double>();
  auto vb = nlohmann::json::parse(b.out)["results"]["K_integral"]["value"].get<double>();
  EXPECT_NE(va, vb);
  EXPECT_EQ(nlohmann::json::parse(b.out)["parameters"]["seed"], 2);
}

TEST(Cli, ExperimentSubcommands) {
  auto s5 = run_cli({"section5", spec_path("distance_bound_d0_2.yaml")});
  ASSERT_EQ(s5.code, 0) << s5.err;
  auto j = nlohmann::json::parse(s5.out);
  EXPECT_EQ(j["results"]["bound"]["rational"], "1/99532800");

  auto g = run_cli({"defect-growth", spec_path("defect_z1_plus_z2.yaml")});
  ASSERT_EQ(g.code, 0) << g.err;
  auto one = run_cli({"defect-growth", spec_path("defect_one.yaml")});
  ASSERT_EQ(one.code, 0) << one.err;
  for (const auto& row : nlohmann::json::parse(one.out)["results"]["tables"][0]["rows"]) EXPECT_EQ(row["rank"], 1);

  auto l = run_cli({"lemma61-check", spec_path("defect_assemblies.yaml")});
  ASSERT_EQ(l.code, 0) << l.err;
  EXPECT_EQ(run_cli({"lemma61-check", spec_path("defect_assemblies.yaml"), "--cutoff", "3"}).code, kExitInput);

  auto e = run_cli({"euler", spec_path("graph_z1.yaml")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(nlohmann::json::parse(e.out)["results"]["chi_rank"]["value"], 1);
}

TEST(Cli, TextFormatAndOutFile) {
  auto out = fs::temp_directory_path() / "dacurv_test_report.txt";
  auto r = run_cli({"fiber-dim", spec_path("constants.yaml"), "--format", "text", "--out", out.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("subcommand: \"fiber-dim\""), std::string::npos);
  EXPECT_NE(ss.str().find("verdicts:"), std::string::npos);
}

TEST(Cli, UnusableRadialGridExitsThree) {
  auto r = run_cli({"curvature", spec_path("graph_z1.yaml"), "--r-grid", "0.5,0.6"});
  EXPECT_EQ(r.code, kExitInput);
}

TEST(Cli, FailedVerdictExitsFour) {
  // Degree 2 is too early for the Hilbert differences to stabilize.
  auto r = run_cli({"euler", spec_path("graph_z1z2.yaml"), "--cutoff", "2"});
  EXPECT_EQ(r.code, kExitInconsistent);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["pass"].get<bool>());
  EXPECT_NE(r.err.find("not stabilized"), std::string::npos);
}
