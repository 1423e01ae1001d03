#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "symflow/checks.hpp"
#include "symflow/evaluate.hpp"
#include "symflow/flow.hpp"
#include "symflow/parse.hpp"
#include "symflow/tower.hpp"

namespace symflow::cli {

namespace {

Json boxes(const std::vector<Interval>& axes) {
  Json a = Json::array();
  for (const auto& i : axes) a.push_back({number(i.lo), number(i.hi)});
  return a;
}

NamedResult verdict_result(const std::string& name, const Verdict& v) {
  return {name, to_json(v), text_lines(v)};
}

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (const auto& p : parts) s += (s.empty() ? "" : ", ") + p;
  return s;
}

}  // namespace

int exit_code_for(const std::vector<Status>& statuses) {
  bool inconclusive = false;
  for (Status s : statuses) {
    if (s == Status::fails) return 1;
    if (s == Status::inconclusive) inconclusive = true;
  }
  return inconclusive ? 3 : 0;
}

int exit_code_for(Existence e) {
  switch (e) {
    case Existence::exists:
      return 0;
    case Existence::not_exists:
      return 1;
    case Existence::hypotheses_violated:
      return 3;
  }
  return 3;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

Report cmd_check(const SystemSpec& spec, const CheckOptions& options, std::uint64_t seed) {
  if (!spec.has_sigma()) throw UsageError("check needs a map (S1..Sn) in the system file");
  if (options.orders < 0) throw UsageError("--orders must be >= 0");
  Report r;
  r.command = "check";
  r.spec = spec;
  r.seed = seed;
  const VectorField f = spec.build_field();
  const SmoothMap sigma = *spec.build_sigma();
  const DomainBox& box = f.domain();
  ZeroTestOptions zopt;
  zopt.seed = seed;
  r.parameters = {{"kind", to_string(options.kind)}, {"orders", number(options.orders)}, {"flow", options.flow},
                  {"domain", boxes(box.axes())}};

  std::vector<Status> statuses;
  auto add = [&](const std::string& name, const Verdict& v) {
    statuses.push_back(v.status);
    r.results.push_back(verdict_result(name, v));
  };
  add("structural", check_structural(f, sigma, options.kind, box, zopt));
  add("involution", is_involution(sigma, box, zopt));
  add("measure_preserving", is_measure_preserving(sigma, box, zopt));

  TowerTransformReport tt = check_tower_transform(f, sigma, options.kind, options.orders, box, zopt);
  Json orders = Json::array();
  std::vector<std::string> text = text_lines(tt.verdict);
  for (std::size_t j = 0; j < tt.orders.size(); ++j) {
    orders.push_back({{"order", number(j)}, {"sign", number(tt.signs[j])}, {"verdict", to_json(tt.orders[j])}});
    text.push_back("order " + std::to_string(j) + " sign " + std::to_string(tt.signs[j]) + ": " +
                   to_string(tt.orders[j].status) + " (" + to_string(tt.orders[j].certainty) + ")");
  }
  statuses.push_back(tt.verdict.status);
  r.results.push_back({"tower_transform", Json{{"verdict", to_json(tt.verdict)}, {"orders", orders}}, text});

  if (options.flow) {
    FlowCheckOptions fopt;
    fopt.samples = options.flow_samples;
    fopt.region = spec.region ? DomainBox(*spec.region) : box;
    fopt.integrator.horizon = options.horizon;
    fopt.integrator.step = options.step;
    fopt.seed = seed;
    r.parameters["flow_region"] = boxes(fopt.region->axes());
    r.parameters["horizon"] = number(options.horizon);
    r.parameters["step"] = number(options.step);
    r.parameters["flow_samples"] = number(options.flow_samples);
    add("flow_relation", check_flow_relation(f, sigma, options.kind, fopt));
  }
  r.exit_code = exit_code_for(statuses);
  return r;
}

Report cmd_classify(const SystemSpec& spec, const ClassifyOptions& options, std::uint64_t seed) {
  if (spec.family == FamilyHint::generic) throw UsageError("classify needs family=lotka_volterra or family=lienard");
  Report r;
  r.command = "classify";
  r.spec = spec;
  r.seed = seed;
  FamilyClassification fc;
  if (spec.family == FamilyHint::lotka_volterra) {
    fc = classify_lotka_volterra(spec.a, spec.b, spec.c, spec.d, spec.domain());
  } else {
    LienardOptions lopt;
    lopt.seed = seed;
    lopt.y_range = spec.domain().axis(1);
    fc = classify_lienard(parse(spec.f, 2), parse(spec.g, 2), *spec.interval, lopt);
    r.parameters["interval"] = boxes({*spec.interval});
  }
  r.parameters["family"] = to_string(fc.family);
  r.parameters["field"] = component_strings(fc.field);
  r.parameters["domain"] = boxes(fc.field.domain().axes());
  if (options.kind) r.parameters["kind"] = to_string(*options.kind);
  for (const Classification* c : {&fc.reversibility, &fc.symmetry}) {
    if (options.kind && *options.kind != c->kind) continue;
    r.results.push_back({to_string(c->kind), to_json(*c), text_lines(*c)});
  }
  Existence decided = fc.overall();
  if (options.kind) decided = *options.kind == CheckKind::reversibility ? fc.reversibility.verdict : fc.symmetry.verdict;
  if (!options.kind) r.results.push_back({"overall", Json{{"verdict", to_string(decided)}}, {to_string(decided)}});
  r.exit_code = exit_code_for(decided);
  return r;
}

Report cmd_candidates(const SystemSpec& spec, const CandidatesOptions& options, std::uint64_t seed) {
  Report r;
  r.command = "candidates";
  r.spec = spec;
  r.seed = seed;
  const VectorField f = spec.build_field();
  const int n = f.dimension();
  Selection pi = options.selection ? Selection(*options.selection) : Selection::leading(n);
  if (pi.size() != n) throw UsageError("--selection needs " + std::to_string(n) + " orders");
  TableOptions topt;
  std::vector<Interval> grid = options.grid ? *options.grid : spec.grid ? *spec.grid : f.domain().scaled(0.5).axes();
  if (static_cast<int>(grid.size()) != n) throw UsageError("--grid dimension differs from the system");
  topt.grid = DomainBox(grid);
  if (options.per_axis < 1) throw UsageError("--per-axis must be >= 1");
  topt.per_axis = options.per_axis;
  topt.anchor = options.anchor;
  if (topt.anchor && static_cast<int>(topt.anchor->size()) != n) throw UsageError("--anchor dimension differs");

  Json sel = Json::array();
  for (int e : pi.entries()) sel.push_back(number(e));
  r.parameters = {{"kind", to_string(options.kind)}, {"selection", sel}, {"grid", boxes(grid)},
                  {"per_axis", number(options.per_axis)}, {"domain", boxes(f.domain().axes())}};
  if (options.anchor) r.parameters["anchor"] = to_json(*options.anchor);
  r.parameters["csv"] = options.csv;

  CandidatePointMap m = candidate_map_table(f, pi, options.kind, topt);
  std::ostringstream csv;
  write_candidate_csv(csv, m, n);
  write_atomic(options.csv, csv.str());
  r.outputs.push_back(options.csv);

  std::vector<std::string> text = text_lines(m.verdict);
  text.push_back("grid " + std::to_string(m.grid_points) + ", singular " + std::to_string(m.singular_points) +
                 ", consistent " + std::to_string(m.consistent_points) + ", switches " +
                 std::to_string(m.branch_switches) + ", newton failures " + std::to_string(m.newton_failures));
  if (m.trivial_only) text.push_back("only the trivial identity branch");
  if (m.fitted) {
    text.push_back("fitted map (" + join(component_strings(*m.fitted)) + "), fit residual " + number(m.fit_residual));
    text.push_back("fitted map structural check: " + std::string(to_string(m.fitted_check->status)));
  }
  r.results.push_back({"candidate_map", to_json(m), text});
  std::vector<Status> statuses{m.verdict.status};
  if (m.fitted_check) statuses.push_back(m.fitted_check->status);
  r.exit_code = exit_code_for(statuses);
  return r;
}

Report cmd_tower(const SystemSpec& spec, const TowerCommandOptions& options, std::uint64_t seed) {
  if (options.orders < 0) throw UsageError("--orders must be >= 0");
  Report r;
  r.command = "tower";
  r.spec = spec;
  r.seed = seed;
  const VectorField f = spec.build_field();
  r.parameters = {{"orders", number(options.orders)}, {"field", component_strings(f)}};
  if (options.at) {
    if (static_cast<int>(options.at->size()) != f.dimension()) throw UsageError("--at dimension differs");
    r.parameters["at"] = to_json(*options.at);
  }
  DivergenceTower t = build_tower(f, options.orders);
  Json orders = Json::array();
  std::vector<std::string> text;
  for (int j = 0; j <= options.orders; ++j) {
    Json o = {{"order", number(j)}, {"expression", to_string(t[j], f.dimension())},
              {"nodes", number(node_count(t[j]))}};
    std::string line = "D" + std::to_string(j) + " = " + to_string(t[j], f.dimension());
    if (options.at) {
      double v = evaluate(t[j], *options.at);
      o["value"] = number(v);
      line += "  [" + number(v);
      try {
        double fd = tower_fd_oracle(f, *options.at, j);
        o["oracle"] = number(fd);
        line += ", oracle " + number(fd);
      } catch (const std::exception&) {
        o["oracle"] = nullptr;
      }
      line += "]";
    }
    orders.push_back(o);
    text.push_back(line);
  }
  r.results.push_back({"tower", Json{{"orders", orders}}, text});
  r.exit_code = 0;
  return r;
}

Report cmd_trajectory(const SystemSpec& spec, const TrajectoryOptions& options, std::uint64_t seed) {
  Report r;
  r.command = "trajectory";
  r.spec = spec;
  r.seed = seed;
  const VectorField f = spec.build_field();
  if (static_cast<int>(options.from.size()) != f.dimension()) throw UsageError("--from dimension differs");
  if (!(options.step > 0) || !(options.horizon >= 0)) throw UsageError("--step must be > 0 and --horizon >= 0");
  IntegratorConfig cfg{options.step, options.horizon, 2.0};
  r.parameters = {{"from", to_json(options.from)}, {"horizon", number(options.horizon)},
                  {"step", number(options.step)}, {"csv", options.csv}};
  if (!f.domain().contains(options.from)) throw UsageError("--from lies outside the domain box");
  Trajectory tr = integrate(f, options.from, cfg);
  if (tr.times.empty()) throw UsageError("trajectory is empty");
  std::ostringstream csv;
  write_trajectory_csv(csv, tr, f.dimension());
  write_atomic(options.csv, csv.str());
  r.outputs.push_back(options.csv);
  Json body = {{"points", number(tr.times.size())},
               {"t_min", number(tr.times.front())},
               {"t_max", number(tr.times.back())},
               {"start", to_json(tr.states.front())},
               {"end", to_json(tr.states.back())},
               {"truncated", tr.truncated},
               {"truncation_cause", tr.truncation_cause}};
  std::vector<std::string> text{std::to_string(tr.times.size()) + " points on [" + number(tr.times.front()) + ", " +
                                number(tr.times.back()) + "]"};
  if (tr.truncated) text.push_back("truncated: " + tr.truncation_cause);
  r.results.push_back({"trajectory", body, text});
  r.exit_code = 0;
  return r;
}

}  // namespace symflow::cli
