#pragma once

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symflow/classify.hpp"
#include "symflow/field.hpp"

namespace symflow::cli {

/// Malformed system file; line is 1-based, 0 when not tied to a line.
class SpecError : public std::runtime_error {
 public:
  SpecError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class FamilyHint { generic, lotka_volterra, lienard };

/// Parsed key=value system description. Keys:
///   dim, F1..Fn, S1..Sn, box=lo,hi,lo,hi,..., region=..., grid=...,
///   family=generic|lotka_volterra|lienard, a b c d (rationals), f, g,
///   interval=lo,hi, name. Lines starting with '#' are comments.
struct SystemSpec {
  std::string source;
  std::string name;
  int dimension = 0;
  std::vector<std::string> field;
  std::vector<std::string> sigma;
  std::optional<std::vector<Interval>> box;
  std::optional<std::vector<Interval>> region;
  std::optional<std::vector<Interval>> grid;
  FamilyHint family = FamilyHint::generic;
  Rational a, b, c, d;
  std::string f, g;
  std::optional<Interval> interval;
  /// Every key=value pair in file order, for the report echo.
  std::vector<std::pair<std::string, std::string>> entries;

  bool has_sigma() const { return !sigma.empty(); }
  DomainBox domain() const;
  VectorField build_field() const;
  std::optional<SmoothMap> build_sigma() const;
};

SystemSpec parse_spec(std::istream& in, const std::string& source = {});
SystemSpec load_spec(const std::string& path);

/// "lo,hi,lo,hi,..." into intervals; throws SpecError.
std::vector<Interval> parse_box(const std::string& text, std::size_t line = 0);
/// Comma separated doubles.
std::vector<double> parse_numbers(const std::string& text, std::size_t line = 0);

const char* to_string(FamilyHint h);

}  // namespace symflow::cli
