#include "symflow/verdict.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "symflow/algebra.hpp"
#include "symflow/evaluate.hpp"

namespace symflow {

DomainBox::DomainBox(std::vector<Interval> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw std::invalid_argument("domain box needs at least one axis");
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (!(axes_[i].lo < axes_[i].hi)) {
      throw std::invalid_argument("domain box axis " + std::to_string(i + 1) + " must satisfy lo < hi");
    }
  }
}

DomainBox DomainBox::cube(int dimension, double lo, double hi) {
  return DomainBox(std::vector<Interval>(static_cast<std::size_t>(dimension), Interval{lo, hi}));
}

bool DomainBox::contains(std::span<const double> p) const {
  if (p.size() != axes_.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= axes_[i].lo && p[i] <= axes_[i].hi)) return false;
  }
  return true;
}

Point DomainBox::center() const {
  Point c;
  c.reserve(axes_.size());
  for (const auto& a : axes_) c.push_back(a.mid());
  return c;
}

double DomainBox::volume() const {
  double v = 1.0;
  for (const auto& a : axes_) v *= a.width();
  return v;
}

DomainBox DomainBox::scaled(double factor) const {
  std::vector<Interval> out;
  out.reserve(axes_.size());
  for (const auto& a : axes_) {
    double half = 0.5 * a.width() * factor;
    out.push_back({a.mid() - half, a.mid() + half});
  }
  return DomainBox(std::move(out));
}

Point DomainBox::sample(std::mt19937_64& rng) const {
  Point p;
  p.reserve(axes_.size());
  for (const auto& a : axes_) p.push_back(std::uniform_real_distribution<double>(a.lo, a.hi)(rng));
  return p;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::holds: return "holds";
    case Status::fails: return "fails";
    case Status::inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(Certainty c) { return c == Certainty::certain ? "certain" : "probabilistic"; }

const char* to_string(CheckKind k) { return k == CheckKind::symmetry ? "symmetry" : "reversibility"; }

void Verdict::add_witness(Point p, double residual) {
  Witness w{std::move(p), residual};
  auto it = std::upper_bound(witnesses.begin(), witnesses.end(), w,
                             [](const Witness& a, const Witness& b) { return a.residual > b.residual; });
  witnesses.insert(it, std::move(w));
  if (witnesses.size() > kMaxWitnesses) witnesses.pop_back();
}

void Verdict::note(const std::string& text) {
  if (text.empty()) return;
  if (!notes.empty()) notes += "; ";
  notes += text;
}

Verdict combine(std::span<const Verdict> parts, const std::string& label_prefix, std::size_t first_label) {
  Verdict out;
  bool any_fail = false;
  bool any_inconclusive = false;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Verdict& v = parts[i];
    any_fail |= v.status == Status::fails;
    any_inconclusive |= v.status == Status::inconclusive;
    if (v.certainty == Certainty::probabilistic) out.certainty = Certainty::probabilistic;
    out.residual_max = std::max(out.residual_max, v.residual_max);
    out.samples += v.samples;
    out.skipped += v.skipped;
    for (const auto& w : v.witnesses) out.add_witness(w.point, w.residual);
    if (!v.notes.empty()) {
      out.note(label_prefix.empty() ? v.notes : label_prefix + std::to_string(i + first_label) + ": " + v.notes);
    }
  }
  out.status = any_fail ? Status::fails : (any_inconclusive ? Status::inconclusive : Status::holds);
  return out;
}

Verdict identically_zero(const Expr& e, const DomainBox& box, const ZeroTestOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("identically_zero needs at least one trial");
  Verdict v;
  Expr canonical = simplify(e);
  if (canonical.is_zero()) {
    v.status = Status::holds;
    v.certainty = Certainty::certain;
    v.note("canonical form is 0");
    return v;
  }

  std::mt19937_64 rng(options.seed);
  const bool polynomial = is_polynomial(canonical);
  if (polynomial) {
    // A nonzero canonical polynomial cannot vanish identically; sample only
    // to report where it is largest.
    v.status = Status::fails;
    v.certainty = Certainty::certain;
    v.note("canonical form is the nonzero polynomial " + to_string(canonical, box.dimension()));
    for (std::size_t i = 0; i < options.trials; ++i) {
      Point p = box.sample(rng);
      double r = std::abs(evaluate(canonical, p));
      ++v.samples;
      v.residual_max = std::max(v.residual_max, r);
      v.add_witness(std::move(p), r);
    }
    return v;
  }

  v.certainty = Certainty::probabilistic;
  EvalTrace trace;
  std::vector<Witness> evaluated;
  for (std::size_t i = 0; i < options.trials; ++i) {
    Point p = box.sample(rng);
    ++v.samples;
    try {
      double r = std::abs(evaluate(e, p, &trace));
      evaluated.push_back({std::move(p), r});
    } catch (const EvaluationError&) {
      ++v.skipped;
    }
  }
  if (evaluated.empty()) {
    v.status = Status::inconclusive;
    v.note("every sample point failed to evaluate");
    return v;
  }
  const double tol = options.tolerance.value_or(1e-9 * (1.0 + trace.max_abs_subterm));
  for (auto& w : evaluated) {
    v.residual_max = std::max(v.residual_max, w.residual);
    if (w.residual >= tol) v.add_witness(std::move(w.point), w.residual);
  }
  v.status = v.residual_max < tol ? Status::holds : Status::fails;
  if (v.skipped > 0) v.note(std::to_string(v.skipped) + " sample(s) skipped by evaluation errors");
  return v;
}

}  // namespace symflow
