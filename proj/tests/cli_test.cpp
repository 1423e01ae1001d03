#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "report.hpp"
#include "spec_file.hpp"

namespace symflow::cli {
namespace {

SystemSpec spec(const std::string& text) {
  std::istringstream in(text);
  return parse_spec(in, "inline");
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("symflow_cli_test_" + name)).string();
}

TEST(SpecFile, GenericSystem) {
  SystemSpec s = spec("# comment\ndim=2\nF1=y + x^2\nF2 = -x\nS1=-x\nS2=y\nbox=-1,1,-3,3\n");
  EXPECT_EQ(s.dimension, 2);
  EXPECT_EQ(s.field, (std::vector<std::string>{"y + x^2", "-x"}));
  EXPECT_TRUE(s.has_sigma());
  EXPECT_EQ(s.domain().axis(1).hi, 3.0);
  EXPECT_EQ(s.entries.size(), 6u);
  EXPECT_EQ(to_string(s.build_field()[0]), "x^2 + y");
}

TEST(SpecFile, DimensionInferred) {
  SystemSpec s = spec("F1=y\nF2=-x\n");
  EXPECT_EQ(s.dimension, 2);
  EXPECT_EQ(s.domain().axis(0).lo, -2.0);
}

TEST(SpecFile, Families) {
  SystemSpec lv = spec("family=lotka_volterra\na=1\nb=2\nc=3\nd=-1/2\n");
  EXPECT_EQ(lv.dimension, 2);
  EXPECT_EQ(lv.d, make_rational(-1, 2));
  EXPECT_EQ(to_string(lv.build_field()[1]), "3*x*y + 1/2*y");

  SystemSpec li = spec("family=lienard\nf=x^3\ng=x\n");
  EXPECT_EQ(li.interval->lo, -1.0);
  EXPECT_EQ(to_string(li.build_field()[1]), "-x^3*y - x");
}

TEST(SpecFile, Errors) {
  auto line_of = [](const std::string& text) {
    try {
      spec(text);
    } catch (const SpecError& e) {
      return e.line();
    }
    return std::size_t{999};
  };
  EXPECT_EQ(line_of("dim=2\nF1=y\nF2=x +\n"), 3u);
  EXPECT_EQ(line_of("F1=y\nnonsense\n"), 2u);
  EXPECT_EQ(line_of("F1=y\nF1=x\n"), 2u);
  EXPECT_EQ(line_of("F1=y\nF2=x\nwat=3\n"), 3u);
  EXPECT_EQ(line_of("dim=3\nF1=y\nF2=x\n"), 1u);
  EXPECT_EQ(line_of("F1=y\nF2=x\nbox=1,0,0,1\n"), 3u);
  EXPECT_EQ(line_of("F1=y\nF2=x\nS1=x\n"), 3u);
  EXPECT_EQ(line_of("F1=w\n"), 1u);
  EXPECT_EQ(line_of("family=lienard\nf=y\ng=x\n"), 2u);
  EXPECT_THROW(spec("family=lotka_volterra\na=1\nb=1\nc=1\n"), SpecError);
  EXPECT_THROW(spec("family=lienard\nf=x\ng=x\ninterval=0,1\n"), SpecError);
  EXPECT_THROW(spec("family=lotka_volterra\na=1\nb=1\nc=1\nd=1\nF1=x\n"), SpecError);
  EXPECT_THROW(spec(""), SpecError);
}

TEST(Numbers, ShortestRoundTrip) {
  EXPECT_EQ(number(0.1), "0.1");
  EXPECT_EQ(number(-0.0), "0");
  EXPECT_EQ(number(1e-300), "1e-300");
  EXPECT_EQ(number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(number(42), "42");
  EXPECT_EQ(std::stod(number(2.0 / 3)), 2.0 / 3);
}

TEST(Commands, CheckLienard) {
  SystemSpec s = spec("family=lienard\nf=x^3\ng=x\nS1=-x\nS2=y\n");
  Report r = cmd_check(s, {}, 0);
  EXPECT_EQ(r.exit_code, 0);
  ASSERT_EQ(r.results.size(), 4u);
  EXPECT_EQ(r.results[0].name, "structural");
  EXPECT_EQ(r.results[3].name, "tower_transform");
  Json j = r.to_json();
  EXPECT_EQ(j["schema_version"], "1");
  EXPECT_EQ(j["results"][0]["result"]["status"], "holds");
  EXPECT_EQ(j["results"][0]["result"]["residual_max"], "0");
}

TEST(Commands, CheckBrokenPredatorPrey) {
  SystemSpec s = spec("family=lotka_volterra\na=1\nb=2\nc=3\nd=2\nS1=2*y/3\nS2=3*x/2\nbox=0,5,0,5\n");
  Report r = cmd_check(s, {}, 0);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_FALSE(r.to_json()["results"][0]["result"]["witnesses"].empty());
}

TEST(Commands, CheckFlowPredatorPrey) {
  SystemSpec s =
      spec("family=lotka_volterra\na=1\nb=2\nc=3\nd=1\nS1=2*y/3\nS2=3*x/2\nbox=0,5,0,5\nregion=0.2,2,0.2,2\n");
  CheckOptions opt;
  opt.flow = true;
  Report r = cmd_check(s, opt, 0);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.results.back().name, "flow_relation");
}

TEST(Commands, CheckNeedsMap) {
  EXPECT_THROW(cmd_check(spec("F1=y\nF2=-x\n"), {}, 0), UsageError);
}

TEST(Commands, Classify) {
  EXPECT_EQ(cmd_classify(spec("family=lotka_volterra\na=1\nb=1\nc=1\nd=1\n"), {}, 0).exit_code, 0);
  EXPECT_EQ(cmd_classify(spec("family=lotka_volterra\na=1\nb=2\nc=3\nd=2\n"), {}, 0).exit_code, 1);
  EXPECT_EQ(cmd_classify(spec("family=lotka_volterra\na=1\nb=0\nc=1\nd=1\n"), {}, 0).exit_code, 3);
  Report aps = cmd_classify(spec("family=lienard\nf=x^2\ng=x^3\n"), {}, 0);
  EXPECT_EQ(aps.exit_code, 0);
  Json j = aps.to_json();
  EXPECT_EQ(j["results"][1]["name"], "symmetry");
  EXPECT_EQ(j["results"][1]["result"]["sigma"], Json({"-x", "-y"}));
  EXPECT_EQ(cmd_classify(spec("family=lienard\nf=x^2\ng=x^2\n"), {}, 0).exit_code, 3);
  ClassifyOptions only;
  only.kind = CheckKind::symmetry;
  Report lv = cmd_classify(spec("family=lotka_volterra\na=1\nb=1\nc=1\nd=1\n"), only, 0);
  EXPECT_EQ(lv.exit_code, 1);
  EXPECT_EQ(lv.results.size(), 1u);
  EXPECT_THROW(cmd_classify(spec("F1=y\nF2=-x\n"), {}, 0), UsageError);
}

TEST(Commands, Candidates) {
  CandidatesOptions opt;
  opt.csv = temp_path("we.csv");
  Report r = cmd_candidates(spec("F1=y + x^2\nF2=-x - x^3\n"), opt, 0);
  EXPECT_EQ(r.exit_code, 0);
  Json j = r.to_json()["results"][0]["result"];
  EXPECT_EQ(j["fitted"], Json({"-x", "y"}));
  EXPECT_LT(std::stod(j["fit_residual"].get<std::string>()), 1e-8);
  EXPECT_TRUE(std::filesystem::exists(opt.csv));

  opt.csv = temp_path("no.csv");
  Report bad = cmd_candidates(spec("F1=y + x^2\nF2=-x - x^2\n"), opt, 0);
  EXPECT_EQ(bad.exit_code, 1);
  Json b = bad.to_json()["results"][0]["result"];
  EXPECT_EQ(b["fitted"], Json({"-x", "y"}));
  EXPECT_EQ(b["fitted_check"]["status"], "fails");

  opt.kind = CheckKind::symmetry;
  Report sym = cmd_candidates(spec("F1=y + x^2\nF2=-x - x^2\n"), opt, 0);
  EXPECT_EQ(sym.exit_code, 3);
  EXPECT_EQ(sym.to_json()["results"][0]["result"]["trivial_only"], true);
}

TEST(Commands, CandidatesGloballySingular) {
  // Divergence tower is constant, so Delta is singular everywhere.
  CandidatesOptions opt;
  opt.csv = temp_path("lin.csv");
  Report r = cmd_candidates(spec("F1=y\nF2=-x\n"), opt, 0);
  EXPECT_EQ(r.exit_code, 3);
}

TEST(Commands, TowerAndTrajectory) {
  TowerCommandOptions t;
  t.orders = 1;
  t.at = Point{0.3, 0.2};
  Report r = cmd_tower(spec("F1=y + x^2\nF2=-x\n"), t, 0);
  Json j = r.to_json()["results"][0]["result"]["orders"];
  EXPECT_EQ(j[1]["expression"], "2*x^2 + 2*y");
  EXPECT_NEAR(std::stod(j[1]["oracle"].get<std::string>()), 0.58, 1e-5);

  TrajectoryOptions tr;
  tr.from = {1, 0};
  tr.csv = temp_path("traj.csv");
  Report rt = cmd_trajectory(spec("F1=y\nF2=-x\n"), tr, 0);
  EXPECT_EQ(rt.to_json()["results"][0]["result"]["points"], "2001");
  tr.from = {5, 0};
  EXPECT_THROW(cmd_trajectory(spec("F1=y\nF2=-x\n"), tr, 0), UsageError);
}

TEST(Report, DeterministicAcrossRuns) {
  SystemSpec s = spec("F1=y\nF2=-sin(x)\nS1=-x\nS2=-y\n");
  CheckOptions opt;
  opt.kind = CheckKind::symmetry;
  opt.flow = true;
  std::string a = cmd_check(s, opt, 7).to_json().dump(2);
  std::string b = cmd_check(s, opt, 7).to_json().dump(2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("timing"), std::string::npos);
}

TEST(Report, ExitCodeAggregation) {
  EXPECT_EQ(exit_code_for(std::vector<Status>{Status::holds, Status::holds}), 0);
  EXPECT_EQ(exit_code_for(std::vector<Status>{Status::holds, Status::inconclusive}), 3);
  EXPECT_EQ(exit_code_for(std::vector<Status>{Status::inconclusive, Status::fails}), 1);
  EXPECT_EQ(exit_code_for(Existence::hypotheses_violated), 3);
}

TEST(Report, AtomicWrite) {
  std::string p = temp_path("atomic.txt");
  write_atomic(p, "one");
  write_atomic(p, "two");
  std::ifstream in(p);
  std::string s;
  in >> s;
  EXPECT_EQ(s, "two");
  EXPECT_FALSE(std::filesystem::exists(p + ".tmp"));
}

}  // namespace
}  // namespace symflow::cli
