#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symflow/field.hpp"
#include "symflow/verdict.hpp"

namespace symflow {

enum class Family { lotka_volterra, lienard };
enum class Existence { exists, not_exists, hypotheses_violated };

const char* to_string(Family f);
const char* to_string(Existence e);

/// One named hypothesis or parity condition. Informational conditions
/// are reported but never decide the outcome.
struct Condition {
  std::string name;
  bool satisfied = false;
  double residual = 0.0;
  Certainty certainty = Certainty::certain;
  std::string detail;
  bool informational = false;
};

/// Outcome for one kind (reversibility or symmetry) of one family.
struct Classification {
  Family family = Family::lotka_volterra;
  CheckKind kind = CheckKind::reversibility;
  Existence verdict = Existence::hypotheses_violated;
  std::optional<SmoothMap> sigma;
  std::vector<Condition> conditions;
  std::vector<std::pair<std::string, Verdict>> verification;
  std::vector<Witness> witnesses;
  std::string notes;
};

struct FamilyClassification {
  Family family = Family::lotka_volterra;
  VectorField field;
  Classification reversibility;
  Classification symmetry;

  /// exists if either kind exists, else not_exists if either is refuted.
  Existence overall() const;
};

/// x' = x (a - b y), y' = y (c x - d).
VectorField lotka_volterra_field(const Rational& a, const Rational& b, const Rational& c, const Rational& d,
                                 const DomainBox& box = DomainBox::cube(2, -2, 2));

/// x' = y, y' = -g(x) - y f(x) on interval x y_range. f and g may use x only.
VectorField lienard_field(const Expr& f, const Expr& g, Interval interval, Interval y_range = {-2, 2});

FamilyClassification classify_lotka_volterra(const Rational& a, const Rational& b, const Rational& c,
                                             const Rational& d, const DomainBox& box = DomainBox::cube(2, -2, 2));

struct LienardOptions {
  Interval y_range{-2, 2};
  int sign_samples = 200;
  std::uint64_t seed = 0;
};

/// Requires interval.lo < 0 < interval.hi (std::invalid_argument otherwise).
FamilyClassification classify_lienard(const Expr& f, const Expr& g, Interval interval,
                                      const LienardOptions& options = {});

}  // namespace symflow
