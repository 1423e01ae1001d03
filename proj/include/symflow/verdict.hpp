#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "symflow/expr.hpp"

namespace symflow {

using Point = std::vector<double>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

/// Axis-aligned box standing in for the open domain of a system.
class DomainBox {
 public:
  DomainBox() = default;
  /// Throws std::invalid_argument unless lo < hi on every axis.
  explicit DomainBox(std::vector<Interval> axes);
  static DomainBox cube(int dimension, double lo, double hi);

  int dimension() const noexcept { return static_cast<int>(axes_.size()); }
  const Interval& axis(int i) const { return axes_.at(static_cast<std::size_t>(i)); }
  const std::vector<Interval>& axes() const noexcept { return axes_; }

  bool contains(std::span<const double> p) const;
  Point center() const;
  double volume() const;
  /// Scales every half-width about the center.
  DomainBox scaled(double factor) const;
  Point sample(std::mt19937_64& rng) const;

 private:
  std::vector<Interval> axes_;
};

/// Symmetry: sigma commutes with the flow. Reversibility: sigma reverses
/// time.
enum class CheckKind { symmetry, reversibility };

enum class Status { holds, fails, inconclusive };
enum class Certainty { certain, probabilistic };

const char* to_string(Status s);
const char* to_string(Certainty c);
const char* to_string(CheckKind k);

struct Witness {
  Point point;
  double residual = 0.0;
};

/// Outcome of a check. A failing verdict always carries a witness; witnesses
/// are kept sorted by residual, largest first.
struct Verdict {
  static constexpr std::size_t kMaxWitnesses = 5;

  Status status = Status::holds;
  Certainty certainty = Certainty::certain;
  double residual_max = 0.0;
  std::vector<Witness> witnesses;
  std::string notes;
  std::size_t samples = 0;
  std::size_t skipped = 0;

  bool holds() const noexcept { return status == Status::holds; }
  bool fails() const noexcept { return status == Status::fails; }
  void add_witness(Point p, double residual);
  void note(const std::string& text);
};

/// Aggregates sub-verdicts: any failure fails, otherwise any inconclusive
/// result is inconclusive; certain only when every part is certain.
Verdict combine(std::span<const Verdict> parts, const std::string& label_prefix = {}, std::size_t first_label = 1);

struct ZeroTestOptions {
  std::size_t trials = 64;
  /// Absolute tolerance override. Default: 1e-9 * (1 + largest sampled
  /// subterm magnitude).
  std::optional<double> tolerance;
  std::uint64_t seed = 0;
};

/// Decides whether `e` vanishes on `box`. Certain when the canonical form is
/// 0 (holds) or a nonzero polynomial (fails); otherwise sampled at
/// `trials` uniform points. Sample points where evaluation fails are
/// skipped; if all are skipped the result is inconclusive.
Verdict identically_zero(const Expr& e, const DomainBox& box, const ZeroTestOptions& options = {});

}  // namespace symflow
