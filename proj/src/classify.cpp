#include "symflow/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "symflow/algebra.hpp"
#include "symflow/checks.hpp"
#include "symflow/evaluate.hpp"

namespace symflow {

const char* to_string(Family f) {
  return f == Family::lotka_volterra ? "lotka_volterra" : "lienard";
}

const char* to_string(Existence e) {
  switch (e) {
    case Existence::exists:
      return "exists";
    case Existence::not_exists:
      return "not_exists";
    case Existence::hypotheses_violated:
      return "hypotheses_violated";
  }
  return "?";
}

Existence FamilyClassification::overall() const {
  if (reversibility.verdict == Existence::exists || symmetry.verdict == Existence::exists) return Existence::exists;
  if (reversibility.verdict == Existence::not_exists || symmetry.verdict == Existence::not_exists) {
    return Existence::not_exists;
  }
  return Existence::hypotheses_violated;
}

namespace {

const Expr kX = Expr::variable(1);
const Expr kY = Expr::variable(2);

Expr num(const Rational& q) { return Expr::constant(q); }

void append_note(std::string& notes, const std::string& text) {
  if (!notes.empty()) notes += "; ";
  notes += text;
}

// Runs the structural, involution and area checks on an emitted map.
// Returns false when any of them does not hold with certainty.
bool verify(const VectorField& f, Classification& c) {
  const DomainBox& box = f.domain();
  Verdict s = check_structural(f, *c.sigma, c.kind, box);
  Verdict inv = is_involution(*c.sigma, box);
  Verdict mp = is_measure_preserving(*c.sigma, box);
  bool ok = s.holds() && inv.holds() && mp.holds();
  c.verification.emplace_back("structural", std::move(s));
  c.verification.emplace_back("involution", std::move(inv));
  c.verification.emplace_back("measure_preserving", std::move(mp));
  return ok;
}

// Candidate map refuted by the structural identity; its witnesses are kept.
void refute(const VectorField& f, Classification& c, const SmoothMap& candidate) {
  Verdict s = check_structural(f, candidate, c.kind, f.domain());
  for (const auto& w : s.witnesses) c.witnesses.push_back(w);
  c.verification.emplace_back("candidate_structural", std::move(s));
}

Classification lv_route(const VectorField& f, CheckKind kind, const Rational& a, const Rational& b,
                        const Rational& c, const Rational& d) {
  Classification out;
  out.family = Family::lotka_volterra;
  out.kind = kind;
  const Rational bc = b * c;
  const bool nondegenerate = bc != 0;
  out.conditions.push_back({"bc != 0", nondegenerate, std::abs(bc.get_d()), Certainty::certain,
                            "b*c = " + to_string(bc)});
  if (!nondegenerate) {
    out.verdict = Existence::hypotheses_violated;
    out.notes = "triangular system, the classification does not apply";
    return out;
  }
  const bool reversal = kind == CheckKind::reversibility;
  const Rational gap = reversal ? Rational(a - d) : Rational(a + d);
  out.conditions.push_back({reversal ? "a = d" : "a + d = 0", gap == 0, std::abs(gap.get_d()), Certainty::certain,
                            (reversal ? "a - d = " : "a + d = ") + to_string(gap)});
  const Rational sign = reversal ? Rational(1) : Rational(-1);
  SmoothMap sigma({simplify(num(sign * b / c) * kY), simplify(num(sign * c / b) * kX)}, f.domain());
  if (gap != 0) {
    out.verdict = Existence::not_exists;
    refute(f, out, sigma);
    return out;
  }
  out.sigma = sigma;
  out.verdict = verify(f, out) ? Existence::exists : Existence::not_exists;
  if (out.verdict != Existence::exists) append_note(out.notes, "closed-form map failed verification");
  return out;
}

// Coefficients of a univariate polynomial in x, lowest degree first.
std::optional<std::vector<Rational>> coefficients(const Expr& e) {
  if (!is_polynomial(e)) return std::nullopt;
  std::vector<Rational> out;
  Expr d = simplify(e);
  Rational factorial = 1;
  const std::vector<Rational> origin{Rational(0), Rational(0)};
  for (int k = 0; k < 64 && !d.is_zero(); ++k) {
    if (k > 0) factorial *= k;
    auto v = evaluate_exact(d, origin);
    if (!v) return std::nullopt;
    out.push_back(*v / factorial);
    d = differentiate(d, 1);
  }
  if (!d.is_zero()) return std::nullopt;
  return out;
}

// Certain when e is an even polynomial with nonnegative coefficients, not
// identically zero: then e > 0 away from 0.
bool even_nonnegative_polynomial(const Expr& e) {
  auto c = coefficients(e);
  if (!c) return false;
  bool positive = false;
  for (std::size_t k = 0; k < c->size(); ++k) {
    const Rational& q = (*c)[k];
    if (k % 2 == 1 && q != 0) return false;
    if (q < 0) return false;
    if (q > 0) positive = true;
  }
  return positive;
}

// Condition "e > 0 on interval minus {0}".
Condition positive_off_origin(const std::string& name, const Expr& e, Interval interval, int samples) {
  Condition c;
  c.name = name;
  if (even_nonnegative_polynomial(e)) {
    c.satisfied = true;
    c.certainty = Certainty::certain;
    c.detail = "even polynomial with nonnegative coefficients";
    return c;
  }
  const CompiledExpr fn(e);
  c.certainty = Certainty::probabilistic;
  c.satisfied = true;
  double worst = std::numeric_limits<double>::infinity();
  double at = 0.0;
  for (int k = 0; k < samples; ++k) {
    double x = interval.lo + interval.width() * (k + 0.5) / samples;
    if (std::abs(x) < 1e-12) continue;
    const double point[2] = {x, 0.0};
    double v = fn(std::span<const double>(point, 2));
    if (!std::isfinite(v) || v <= 0.0) {
      if (c.satisfied || v < worst) at = x;
      c.satisfied = false;
    }
    if (std::isfinite(v)) worst = std::min(worst, v);
  }
  c.residual = c.satisfied ? 0.0 : std::max(0.0, -worst);
  c.detail = std::to_string(samples) + " samples";
  if (!c.satisfied) c.detail += ", not positive at x = " + std::to_string(at);
  return c;
}

Expr reflect(const Expr& e) {
  const std::vector<Expr> r{-kX, kY};
  return compose(e, r);
}

// Parity test on the symmetric part of the interval.
Condition parity(const std::string& name, const Expr& residual, Interval interval, std::uint64_t seed,
                 std::vector<Witness>& witnesses) {
  const double m = std::min(-interval.lo, interval.hi);
  ZeroTestOptions zopt;
  zopt.seed = seed;
  Verdict v = identically_zero(residual, DomainBox({{-m, m}}), zopt);
  Condition c{name, v.holds(), v.residual_max, v.certainty, v.notes, false};
  if (v.fails()) {
    for (const auto& w : v.witnesses) witnesses.push_back({Point{w.point[0], 0.0}, w.residual});
  }
  return c;
}

double bisect(const CompiledExpr& f, double target, double lo, double hi) {
  auto at = [&](double x) {
    const double p[2] = {x, 0.0};
    return f(std::span<const double>(p, 2)) - target;
  };
  double flo = at(lo), fhi = at(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi) || flo * fhi > 0) return std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = at(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// The implicit reflection alpha and the y-scaling beta of the Delta
// inversion, compared with the expected reflection (-x, beta_expected y).
void alpha_beta(Classification& out, const Expr& f, Interval interval, double beta_expected) {
  const CompiledExpr fn(f);
  const CompiledExpr dfn(simplify(differentiate(f, 1)));
  const bool symmetry = out.kind == CheckKind::symmetry;
  double alpha_err = 0.0, beta_err = 0.0;
  int used = 0;
  for (int k = 0; k < 40; ++k) {
    double x = interval.lo + interval.width() * (k + 0.5) / 40;
    if (std::abs(x) < 1e-3) continue;
    const double p[2] = {x, 0.0};
    double fx = fn(std::span<const double>(p, 2));
    double alpha = symmetry ? (x < 0 ? bisect(fn, fx, 0.0, interval.hi) : bisect(fn, fx, interval.lo, 0.0))
                            : bisect(fn, -fx, interval.lo, interval.hi);
    if (!std::isfinite(alpha)) continue;
    const double q[2] = {alpha, 0.0};
    double beta = dfn(std::span<const double>(p, 2)) / dfn(std::span<const double>(q, 2));
    if (!std::isfinite(beta)) continue;
    alpha_err = std::max(alpha_err, std::abs(alpha + x));
    beta_err = std::max(beta_err, std::abs(beta - beta_expected));
    ++used;
  }
  std::string detail = std::to_string(used) + " points";
  out.conditions.push_back({"alpha(x) = -x", used > 0 && alpha_err < 1e-8, alpha_err, Certainty::probabilistic,
                            detail, true});
  out.conditions.push_back({beta_expected > 0 ? "beta(x) = 1" : "beta(x) = -1", used > 0 && beta_err < 1e-6,
                            beta_err, Certainty::probabilistic, detail, true});
}

Classification lienard_route(const VectorField& field, CheckKind kind, const Expr& f, const Expr& g,
                             Interval interval, const LienardOptions& options) {
  Classification out;
  out.family = Family::lienard;
  out.kind = kind;
  const Expr df = simplify(differentiate(f, 1));
  const Expr xg = simplify(kX * g);
  std::vector<Condition> hyp;
  if (kind == CheckKind::reversibility) {
    Condition f0;
    f0.name = "f(0) = 0";
    const std::vector<Rational> origin{Rational(0), Rational(0)};
    if (auto v = evaluate_exact(f, origin)) {
      f0.satisfied = *v == 0;
      f0.residual = std::abs(v->get_d());
      f0.detail = "exact";
    } else {
      const double p[2] = {0.0, 0.0};
      double v0 = evaluate(f, std::span<const double>(p, 2));
      f0.satisfied = v0 == 0.0;
      f0.residual = std::abs(v0);
      f0.certainty = Certainty::probabilistic;
      f0.detail = "floating point";
    }
    hyp.push_back(f0);
    hyp.push_back(positive_off_origin("f'(x) > 0", df, interval, options.sign_samples));
  } else {
    Condition c = positive_off_origin("x f'(x) > 0", simplify(kX * df), interval, options.sign_samples);
    if (!c.satisfied) {
      Condition mirrored =
          positive_off_origin("x f'(x) < 0", simplify(-(kX * df)), interval, options.sign_samples);
      if (mirrored.satisfied) {
        mirrored.detail += ", mirrored signs";
        c = mirrored;
      }
    }
    hyp.push_back(c);
  }
  hyp.push_back(positive_off_origin("x g(x) > 0", xg, interval, options.sign_samples));
  const bool hypotheses = std::all_of(hyp.begin(), hyp.end(), [](const Condition& c) { return c.satisfied; });
  out.conditions = hyp;

  std::vector<Witness> parity_witnesses;
  const bool odd_f = kind == CheckKind::reversibility;
  Condition pf = parity(odd_f ? "f odd" : "f even", simplify(odd_f ? f + reflect(f) : f - reflect(f)), interval,
                        options.seed, parity_witnesses);
  Condition pg = parity("g odd", simplify(g + reflect(g)), interval, options.seed + 1, parity_witnesses);
  out.conditions.push_back(pf);
  out.conditions.push_back(pg);
  const bool parity_ok = pf.satisfied && pg.satisfied;

  const DomainBox& box = field.domain();
  SmoothMap sigma = odd_f ? SmoothMap({-kX, kY}, box) : SmoothMap({-kX, -kY}, box);
  if (hypotheses) alpha_beta(out, f, interval, odd_f ? 1.0 : -1.0);

  if (parity_ok) {
    out.sigma = sigma;
    out.verdict = verify(field, out) ? Existence::exists : Existence::not_exists;
    if (out.verdict != Existence::exists) append_note(out.notes, "reflection failed verification");
    if (!hypotheses) append_note(out.notes, "hypotheses fail but the reflection is verified directly");
    return out;
  }
  if (!hypotheses) {
    out.verdict = Existence::hypotheses_violated;
    std::string failed;
    for (const auto& c : hyp) {
      if (!c.satisfied) failed += (failed.empty() ? "" : ", ") + c.name;
    }
    append_note(out.notes, "violated: " + failed);
    return out;
  }
  out.verdict = Existence::not_exists;
  out.witnesses = parity_witnesses;
  std::sort(out.witnesses.begin(), out.witnesses.end(),
            [](const Witness& a, const Witness& b) { return a.residual > b.residual; });
  if (out.witnesses.size() > Verdict::kMaxWitnesses) out.witnesses.resize(Verdict::kMaxWitnesses);
  return out;
}

}  // namespace

VectorField lotka_volterra_field(const Rational& a, const Rational& b, const Rational& c, const Rational& d,
                                 const DomainBox& box) {
  return VectorField({kX * (num(a) - num(b) * kY), kY * (num(c) * kX - num(d))}, box);
}

VectorField lienard_field(const Expr& f, const Expr& g, Interval interval, Interval y_range) {
  if (max_variable_index(f) > 1 || max_variable_index(g) > 1) {
    throw std::invalid_argument("f and g may depend on x only");
  }
  return VectorField({kY, -g - kY * f}, DomainBox({interval, y_range}));
}

FamilyClassification classify_lotka_volterra(const Rational& a, const Rational& b, const Rational& c,
                                             const Rational& d, const DomainBox& box) {
  FamilyClassification out;
  out.family = Family::lotka_volterra;
  out.field = lotka_volterra_field(a, b, c, d, box);
  out.reversibility = lv_route(out.field, CheckKind::reversibility, a, b, c, d);
  out.symmetry = lv_route(out.field, CheckKind::symmetry, a, b, c, d);
  return out;
}

FamilyClassification classify_lienard(const Expr& f, const Expr& g, Interval interval,
                                      const LienardOptions& options) {
  if (!(interval.lo < 0 && 0 < interval.hi)) throw std::invalid_argument("interval must contain 0 in its interior");
  FamilyClassification out;
  out.family = Family::lienard;
  out.field = lienard_field(f, g, interval, options.y_range);
  const Expr fs = simplify(f), gs = simplify(g);
  out.reversibility = lienard_route(out.field, CheckKind::reversibility, fs, gs, interval, options);
  out.symmetry = lienard_route(out.field, CheckKind::symmetry, fs, gs, interval, options);
  return out;
}

}  // namespace symflow
