#pragma once

#include <charconv>
#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "spec_file.hpp"
#include "symflow/candidates.hpp"
#include "symflow/classify.hpp"
#include "symflow/verdict.hpp"

namespace symflow::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest round-trip decimal text; "nan", "inf" and "-inf" otherwise.
std::string number(double v);

template <std::integral T>
std::string number(T v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

Json to_json(const Point& p);
Json to_json(const Verdict& v);
Json to_json(const Classification& c);
Json to_json(const CandidatePointMap& m);
Json to_json(const SystemSpec& s);
std::vector<std::string> component_strings(const ExprVector& v);

/// One named check result. Exactly one of verdict / classification / data
/// is meaningful per entry.
struct NamedResult {
  std::string name;
  Json body;
  /// Text rendering lines.
  std::vector<std::string> text;
};

struct Report {
  std::string command;
  std::optional<SystemSpec> spec;
  std::uint64_t seed = 0;
  Json parameters = Json::object();
  std::vector<NamedResult> results;
  int exit_code = 0;
  std::optional<double> seconds;  // only with --timing
  std::vector<std::string> outputs;  // auxiliary files written

  Json to_json() const;
  std::string render_text() const;
};

std::vector<std::string> text_lines(const Verdict& v);
std::vector<std::string> text_lines(const Classification& c);

}  // namespace symflow::cli
