#include "report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace symflow::cli {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

Json to_json(const Point& p) {
  Json a = Json::array();
  for (double v : p) a.push_back(number(v));
  return a;
}

Json to_json(const Verdict& v) {
  Json w = Json::array();
  for (const auto& x : v.witnesses) w.push_back({{"point", to_json(x.point)}, {"residual", number(x.residual)}});
  return {{"status", to_string(v.status)},
          {"certainty", to_string(v.certainty)},
          {"residual_max", number(v.residual_max)},
          {"samples", number(v.samples)},
          {"skipped", number(v.skipped)},
          {"witnesses", w},
          {"notes", v.notes}};
}

std::vector<std::string> component_strings(const ExprVector& v) {
  std::vector<std::string> out;
  for (const auto& c : v.components()) out.push_back(to_string(c, v.dimension()));
  return out;
}

Json to_json(const Classification& c) {
  Json conditions = Json::array();
  for (const auto& k : c.conditions) {
    conditions.push_back({{"name", k.name},
                          {"satisfied", k.satisfied},
                          {"residual", number(k.residual)},
                          {"certainty", to_string(k.certainty)},
                          {"informational", k.informational},
                          {"detail", k.detail}});
  }
  Json verification = Json::array();
  for (const auto& [name, v] : c.verification) verification.push_back({{"name", name}, {"verdict", to_json(v)}});
  Json witnesses = Json::array();
  for (const auto& x : c.witnesses) witnesses.push_back({{"point", to_json(x.point)}, {"residual", number(x.residual)}});
  Json out = {{"family", to_string(c.family)}, {"kind", to_string(c.kind)}, {"verdict", to_string(c.verdict)}};
  out["sigma"] = c.sigma ? Json(component_strings(*c.sigma)) : Json(nullptr);
  out["conditions"] = conditions;
  out["verification"] = verification;
  out["witnesses"] = witnesses;
  out["notes"] = c.notes;
  return out;
}

Json to_json(const CandidatePointMap& m) {
  Json branches = Json::array();
  for (const auto& b : m.branches) {
    branches.push_back({{"id", number(b.id)},
                        {"assigned", number(b.assigned)},
                        {"consistent", number(b.consistent)},
                        {"switches", number(b.switches)},
                        {"structural_residual", number(b.structural_residual)}});
  }
  Json sel = Json::array();
  for (int e : m.selection.entries()) sel.push_back(number(e));
  Json out = {{"selection", sel},
              {"kind", to_string(m.kind)},
              {"grid_points", number(m.grid_points)},
              {"singular_points", number(m.singular_points)},
              {"consistent_points", number(m.consistent_points)},
              {"branch_switches", number(m.branch_switches)},
              {"newton_failures", number(m.newton_failures)},
              {"trivial_only", m.trivial_only},
              {"chosen_branch", number(m.chosen_branch)},
              {"branches", branches},
              {"verdict", to_json(m.verdict)}};
  out["fitted"] = m.fitted ? Json(component_strings(*m.fitted)) : Json(nullptr);
  out["fit_residual"] = number(m.fit_residual);
  out["fitted_check"] = m.fitted_check ? to_json(*m.fitted_check) : Json(nullptr);
  return out;
}

Json to_json(const SystemSpec& s) {
  Json entries = Json::array();
  for (const auto& [k, v] : s.entries) entries.push_back({k, v});
  return {{"source", s.source}, {"name", s.name}, {"dimension", number(s.dimension)},
          {"family", to_string(s.family)}, {"entries", entries}};
}

Json Report::to_json() const {
  Json out = {{"schema_version", kSchemaVersion}, {"tool", "symflow"}, {"version", kToolVersion},
              {"command", command}, {"seed", number(seed)}};
  out["spec"] = spec ? cli::to_json(*spec) : Json(nullptr);
  out["parameters"] = parameters;
  Json res = Json::array();
  for (const auto& r : results) res.push_back({{"name", r.name}, {"result", r.body}});
  out["results"] = res;
  out["outputs"] = outputs;
  out["exit_code"] = number(exit_code);
  if (seconds) out["timing"] = {{"seconds", number(*seconds)}};
  return out;
}

std::vector<std::string> text_lines(const Verdict& v) {
  std::vector<std::string> out;
  out.push_back(std::string(to_string(v.status)) + " (" + to_string(v.certainty) +
                "), residual " + number(v.residual_max));
  for (const auto& w : v.witnesses) {
    std::string p;
    for (double x : w.point) p += (p.empty() ? "" : ", ") + number(x);
    out.push_back("  witness (" + p + ") residual " + number(w.residual));
  }
  if (!v.notes.empty()) out.push_back("  " + v.notes);
  return out;
}

std::vector<std::string> text_lines(const Classification& c) {
  std::vector<std::string> out;
  std::string head = std::string(to_string(c.kind)) + ": " + to_string(c.verdict);
  if (c.sigma) {
    auto comps = component_strings(*c.sigma);
    std::string s;
    for (const auto& t : comps) s += (s.empty() ? "" : ", ") + t;
    head += ", sigma = (" + s + ")";
  }
  out.push_back(head);
  for (const auto& k : c.conditions) {
    out.push_back(std::string("  ") + (k.satisfied ? "[x] " : "[ ] ") + k.name + (k.informational ? " (info)" : "") +
                  " " + to_string(k.certainty) + (k.detail.empty() ? "" : ", " + k.detail));
  }
  for (const auto& [name, v] : c.verification) {
    out.push_back("  " + name + ": " + to_string(v.status) + " (" + to_string(v.certainty) + ")");
  }
  for (const auto& w : c.witnesses) {
    std::string p;
    for (double x : w.point) p += (p.empty() ? "" : ", ") + number(x);
    out.push_back("  witness (" + p + ") residual " + number(w.residual));
  }
  if (!c.notes.empty()) out.push_back("  " + c.notes);
  return out;
}

std::string Report::render_text() const {
  std::ostringstream os;
  os << "symflow " << kToolVersion << " " << command;
  if (spec) os << " " << (spec->name.empty() ? spec->source : spec->name);
  os << " (seed " << seed << ")\n";
  for (const auto& r : results) {
    os << r.name << ":";
    if (r.text.size() == 1) {
      os << " " << r.text.front() << "\n";
    } else {
      os << "\n";
      for (const auto& line : r.text) os << "  " << line << "\n";
    }
  }
  for (const auto& o : outputs) os << "wrote " << o << "\n";
  if (seconds) os << "time " << number(*seconds) << " s\n";
  os << "exit " << exit_code << "\n";
  return os.str();
}

}  // namespace symflow::cli
