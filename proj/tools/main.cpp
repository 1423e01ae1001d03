#include <chrono>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "symflow/tower.hpp"

using namespace symflow;
using namespace symflow::cli;

namespace {

CheckKind kind_from(const std::string& s) {
  if (s == "symmetry") return CheckKind::symmetry;
  if (s == "reversibility") return CheckKind::reversibility;
  throw UsageError("--kind must be symmetry or reversibility");
}

std::vector<int> ints_from(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_numbers(s)) {
    if (v != static_cast<int>(v)) throw UsageError("expected integers: " + s);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetries and reversibilities of smooth vector fields"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "json";
  std::string output;
  std::uint64_t seed = 0;
  bool timing = false;
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("-o,--output", output, "Write the report here instead of stdout");
  app.add_option("--seed", seed, "RNG seed (SYMFLOW_SEED overrides)");
  app.add_flag("--timing", timing, "Include wall time in the report");

  std::string spec_path;
  std::string kind = "reversibility";

  CheckOptions check;
  auto* c_check = app.add_subcommand("check", "Verify a candidate map against a field");
  c_check->add_option("spec", spec_path, "System file")->required();
  c_check->add_option("--kind", kind, "symmetry or reversibility");
  c_check->add_option("--orders", check.orders, "Highest tower order");
  c_check->add_flag("--flow", check.flow, "Also compare flows numerically");
  c_check->add_option("--horizon", check.horizon, "Flow time horizon");
  c_check->add_option("--step", check.step, "RK4 step");
  c_check->add_option("--samples", check.flow_samples, "Flow samples");

  std::string classify_kind;
  auto* c_classify = app.add_subcommand("classify", "Closed-form classification of a family");
  c_classify->add_option("spec", spec_path, "System file")->required();
  c_classify->add_option("--kind", classify_kind, "Restrict to one kind");

  CandidatesOptions cand;
  std::string selection, grid, anchor;
  auto* c_cand = app.add_subcommand("candidates", "Tabulate candidate maps by Delta inversion");
  c_cand->add_option("spec", spec_path, "System file")->required();
  c_cand->add_option("--kind", kind, "symmetry or reversibility");
  c_cand->add_option("--selection", selection, "Tower orders, e.g. 0,1");
  c_cand->add_option("--grid", grid, "Grid box lo,hi,lo,hi");
  c_cand->add_option("--per-axis", cand.per_axis, "Grid points per axis");
  c_cand->add_option("--anchor", anchor, "Continuation start point");
  c_cand->add_option("--csv", cand.csv, "Table output path");

  TowerCommandOptions tower;
  std::string at;
  auto* c_tower = app.add_subcommand("tower", "Print the divergence tower");
  c_tower->add_option("spec", spec_path, "System file")->required();
  c_tower->add_option("--orders", tower.orders, "Highest order");
  c_tower->add_option("--at", at, "Evaluate at this point");

  TrajectoryOptions traj;
  std::string from;
  auto* c_traj = app.add_subcommand("trajectory", "Integrate over [-T, T] and export CSV");
  c_traj->add_option("spec", spec_path, "System file")->required();
  c_traj->add_option("--from", from, "Initial point")->required();
  c_traj->add_option("--horizon", traj.horizon, "Time horizon T");
  c_traj->add_option("--step", traj.step, "RK4 step");
  c_traj->add_option("--csv", traj.csv, "Trajectory output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (const char* env = std::getenv("SYMFLOW_SEED")) {
      auto v = parse_numbers(env);
      if (v.size() != 1 || v[0] < 0 || v[0] != static_cast<double>(static_cast<std::uint64_t>(v[0]))) {
        throw UsageError("SYMFLOW_SEED must be a nonnegative integer");
      }
      seed = static_cast<std::uint64_t>(v[0]);
    }
    const SystemSpec spec = load_spec(spec_path);
    const auto start = std::chrono::steady_clock::now();
    Report report;
    if (*c_check) {
      check.kind = kind_from(kind);
      report = cmd_check(spec, check, seed);
    } else if (*c_classify) {
      ClassifyOptions opt;
      if (!classify_kind.empty()) opt.kind = kind_from(classify_kind);
      report = cmd_classify(spec, opt, seed);
    } else if (*c_cand) {
      cand.kind = kind_from(kind);
      if (!selection.empty()) cand.selection = ints_from(selection);
      if (!grid.empty()) cand.grid = parse_box(grid);
      if (!anchor.empty()) cand.anchor = parse_numbers(anchor);
      report = cmd_candidates(spec, cand, seed);
    } else if (*c_tower) {
      if (!at.empty()) tower.at = parse_numbers(at);
      report = cmd_tower(spec, tower, seed);
    } else {
      traj.from = parse_numbers(from);
      report = cmd_trajectory(spec, traj, seed);
    }
    if (timing) report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string text = format == "json" ? report.to_json().dump(2) + "\n" : report.render_text();
    if (output.empty()) {
      std::cout << text << std::flush;
    } else {
      write_atomic(output, text);
    }
    return report.exit_code;
  } catch (const SpecError& e) {
    std::cerr << "symflow: " << spec_path << ": " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "symflow: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "symflow: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "symflow: " << e.what() << "\n";
    return 2;
  } catch (const TowerBudgetError& e) {
    std::cerr << "symflow: inconclusive: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "symflow: error: " << e.what() << "\n";
    return 3;
  }
}
