#include "spec_file.hpp"

#include <charconv>
#include <fstream>
#include <map>

#include "symflow/parse.hpp"

namespace symflow::cli {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

// Index suffix of keys like F3 / S12; 0 if not of that form.
int component_index(const std::string& key, char prefix) {
  if (key.size() < 2 || key[0] != prefix) return 0;
  int v = 0;
  auto [p, ec] = std::from_chars(key.data() + 1, key.data() + key.size(), v);
  if (ec != std::errc() || p != key.data() + key.size() || v < 1) return 0;
  return v;
}

}  // namespace

const char* to_string(FamilyHint h) {
  switch (h) {
    case FamilyHint::generic:
      return "generic";
    case FamilyHint::lotka_volterra:
      return "lotka_volterra";
    case FamilyHint::lienard:
      return "lienard";
  }
  return "?";
}

std::vector<double> parse_numbers(const std::string& text, std::size_t line) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || p != part.data() + part.size()) {
      throw SpecError("not a number: '" + part + "'", line);
    }
    out.push_back(v);
  }
  return out;
}

std::vector<Interval> parse_box(const std::string& text, std::size_t line) {
  std::vector<double> v = parse_numbers(text, line);
  if (v.empty() || v.size() % 2 != 0) throw SpecError("box needs lo,hi pairs", line);
  std::vector<Interval> out;
  for (std::size_t i = 0; i < v.size(); i += 2) {
    if (!(v[i] < v[i + 1])) throw SpecError("box interval with lo >= hi", line);
    out.push_back({v[i], v[i + 1]});
  }
  return out;
}

SystemSpec parse_spec(std::istream& in, const std::string& source) {
  SystemSpec s;
  s.source = source;
  std::map<int, std::pair<std::string, std::size_t>> fields, sigmas;
  std::map<std::string, std::size_t> seen;
  std::optional<std::size_t> dim_line;
  bool have[4] = {false, false, false, false};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string text = trim(raw);
    if (text.empty() || text[0] == '#') continue;
    auto eq = text.find('=');
    if (eq == std::string::npos) throw SpecError("expected key=value", line);
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw SpecError("empty key", line);
    if (value.empty()) throw SpecError("empty value for '" + key + "'", line);
    if (!seen.emplace(key, line).second) throw SpecError("duplicate key '" + key + "'", line);
    s.entries.emplace_back(key, value);

    if (int i = component_index(key, 'F')) {
      fields[i] = {value, line};
    } else if (int j = component_index(key, 'S')) {
      sigmas[j] = {value, line};
    } else if (key == "dim") {
      auto v = parse_numbers(value, line);
      if (v.size() != 1 || v[0] < 1 || v[0] != static_cast<int>(v[0])) throw SpecError("dim must be a positive integer", line);
      s.dimension = static_cast<int>(v[0]);
      dim_line = line;
    } else if (key == "box") {
      s.box = parse_box(value, line);
    } else if (key == "region") {
      s.region = parse_box(value, line);
    } else if (key == "grid") {
      s.grid = parse_box(value, line);
    } else if (key == "interval") {
      auto iv = parse_box(value, line);
      if (iv.size() != 1) throw SpecError("interval needs exactly lo,hi", line);
      s.interval = iv[0];
    } else if (key == "family") {
      if (value == "generic") {
        s.family = FamilyHint::generic;
      } else if (value == "lotka_volterra" || value == "lv") {
        s.family = FamilyHint::lotka_volterra;
      } else if (value == "lienard") {
        s.family = FamilyHint::lienard;
      } else {
        throw SpecError("unknown family '" + value + "'", line);
      }
    } else if (key == "a" || key == "b" || key == "c" || key == "d") {
      Rational q;
      try {
        q = parse_rational(value);
      } catch (const std::exception& e) {
        throw SpecError("bad rational for '" + key + "': " + e.what(), line);
      }
      const int slot = key[0] - 'a';
      (slot == 0 ? s.a : slot == 1 ? s.b : slot == 2 ? s.c : s.d) = q;
      have[slot] = true;
    } else if (key == "f") {
      s.f = value;
    } else if (key == "g") {
      s.g = value;
    } else if (key == "name") {
      s.name = value;
    } else {
      throw SpecError("unknown key '" + key + "'", line);
    }
  }

  const bool family = s.family != FamilyHint::generic;
  if (family) {
    if (!fields.empty()) throw SpecError("family systems define their own field; drop the F keys", fields.begin()->second.second);
    if (s.dimension != 0 && s.dimension != 2) throw SpecError("family systems are planar", *dim_line);
    s.dimension = 2;
  }
  if (s.family == FamilyHint::lotka_volterra) {
    for (int k = 0; k < 4; ++k) {
      if (!have[k]) throw SpecError(std::string("lotka_volterra needs '") + static_cast<char>('a' + k) + "'", 0);
    }
  }
  if (s.family == FamilyHint::lienard) {
    if (s.f.empty() || s.g.empty()) throw SpecError("lienard needs 'f' and 'g'", 0);
    if (!s.interval) s.interval = Interval{-1, 1};
    if (!(s.interval->lo < 0 && 0 < s.interval->hi)) throw SpecError("interval must contain 0", seen["interval"]);
  }
  if (!family) {
    if (s.dimension == 0) s.dimension = static_cast<int>(fields.size());
    if (s.dimension == 0) throw SpecError("no field components (F1..Fn)", 0);
    if (static_cast<int>(fields.size()) != s.dimension) {
      throw SpecError("expected " + std::to_string(s.dimension) + " field components, got " +
                          std::to_string(fields.size()),
                      dim_line.value_or(0));
    }
  }
  auto collect = [&](const std::map<int, std::pair<std::string, std::size_t>>& m, std::vector<std::string>& out,
                     char prefix) {
    int expect = 1;
    for (const auto& [i, v] : m) {
      if (i != expect) throw SpecError(std::string("missing ") + prefix + std::to_string(expect), v.second);
      out.push_back(v.first);
      ++expect;
    }
  };
  collect(fields, s.field, 'F');
  collect(sigmas, s.sigma, 'S');
  if (!s.sigma.empty() && static_cast<int>(s.sigma.size()) != s.dimension) {
    throw SpecError("expected " + std::to_string(s.dimension) + " map components, got " + std::to_string(s.sigma.size()),
                    sigmas.begin()->second.second);
  }
  for (const auto* b : {&s.box, &s.region, &s.grid}) {
    if (*b && static_cast<int>((*b)->size()) != s.dimension) throw SpecError("box dimension differs from dim", 0);
  }

  // Parse every expression once so errors surface with their line.
  auto check = [&](const std::string& text, const std::string& key, int dim) {
    try {
      (void)parse(text, dim);
    } catch (const std::exception& e) {
      throw SpecError(key + ": " + e.what(), seen[key]);
    }
  };
  for (std::size_t i = 0; i < s.field.size(); ++i) check(s.field[i], "F" + std::to_string(i + 1), s.dimension);
  for (std::size_t i = 0; i < s.sigma.size(); ++i) check(s.sigma[i], "S" + std::to_string(i + 1), s.dimension);
  if (s.family == FamilyHint::lienard) {
    check(s.f, "f", 1);
    check(s.g, "g", 1);
  }
  return s;
}

SystemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open '" + path + "'", 0);
  return parse_spec(in, path);
}

DomainBox SystemSpec::domain() const {
  if (box) return DomainBox(*box);
  if (family == FamilyHint::lienard) return DomainBox({*interval, {-2, 2}});
  return DomainBox::cube(dimension, -2, 2);
}

VectorField SystemSpec::build_field() const {
  switch (family) {
    case FamilyHint::lotka_volterra:
      return lotka_volterra_field(a, b, c, d, domain());
    case FamilyHint::lienard: {
      DomainBox box = domain();
      return lienard_field(symflow::parse(f, 2), symflow::parse(g, 2), box.axis(0), box.axis(1));
    }
    case FamilyHint::generic:
      break;
  }
  std::vector<Expr> comps;
  for (const auto& t : field) comps.push_back(symflow::parse(t, dimension));
  return VectorField(std::move(comps), domain());
}

std::optional<SmoothMap> SystemSpec::build_sigma() const {
  if (sigma.empty()) return std::nullopt;
  std::vector<Expr> comps;
  for (const auto& t : sigma) comps.push_back(symflow::parse(t, dimension));
  return SmoothMap(std::move(comps), domain());
}

}  // namespace symflow::cli
