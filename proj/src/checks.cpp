#include "symflow/checks.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "newton.hpp"
#include "symflow/algebra.hpp"
#include "symflow/evaluate.hpp"

namespace symflow {

std::vector<Expr> structural_residual(const VectorField& f, const SmoothMap& sigma, CheckKind kind) {
  if (f.dimension() != sigma.dimension()) throw DimensionError("map and field dimensions differ");
  const int n = f.dimension();
  ExprMatrix j = jacobian(sigma);
  std::vector<Expr> f_sigma = compose_map(f, sigma);
  std::vector<Expr> out;
  for (int i = 0; i < n; ++i) {
    Expr jf = Expr::constant(0);
    for (int k = 0; k < n; ++k) {
      if (!j(i, k).is_zero()) jf = jf + j(i, k) * f[k];
    }
    Expr r = kind == CheckKind::symmetry ? f_sigma[static_cast<std::size_t>(i)] - jf
                                         : f_sigma[static_cast<std::size_t>(i)] + jf;
    out.push_back(simplify(r));
  }
  return out;
}

Verdict check_structural(const VectorField& f, const SmoothMap& sigma, CheckKind kind, const DomainBox& box,
                         const ZeroTestOptions& options) {
  std::vector<Expr> residual = structural_residual(f, sigma, kind);
  std::vector<Verdict> parts;
  for (std::size_t i = 0; i < residual.size(); ++i) {
    ZeroTestOptions o = options;
    o.seed = options.seed + i;
    parts.push_back(identically_zero(residual[i], box, o));
  }
  return combine(parts, "component ");
}

int tower_sign(CheckKind kind, int order) {
  if (kind == CheckKind::symmetry) return 1;
  return order % 2 == 0 ? -1 : 1;
}

TowerTransformReport check_tower_transform(const VectorField& f, const SmoothMap& sigma, CheckKind kind,
                                           int max_order, const DomainBox& box, const ZeroTestOptions& options,
                                           const TowerOptions& tower_options) {
  if (f.dimension() != sigma.dimension()) throw DimensionError("map and field dimensions differ");
  TowerTransformReport out{{}, {}, {}, build_tower(f, max_order, tower_options)};
  for (int j = 0; j <= max_order; ++j) {
    const int s = tower_sign(kind, j);
    Expr moved = compose(out.tower[j], sigma.components());
    Expr diff = s > 0 ? moved - out.tower[j] : moved + out.tower[j];
    ZeroTestOptions o = options;
    o.seed = options.seed + static_cast<std::uint64_t>(j);
    out.orders.push_back(identically_zero(diff, box, o));
    out.signs.push_back(s);
  }
  out.verdict = combine(out.orders, "order ", 0);
  return out;
}

namespace {

// Reduced row echelon form of [a | b] over the rationals. Returns false
// when the system is inconsistent.
bool solve_affine(std::vector<std::vector<Rational>> a, std::vector<Rational> b, std::vector<Rational>& base,
                  std::vector<std::vector<Rational>>& directions) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    std::swap(b[p], b[r]);
    Rational inv = 1 / a[r][c];
    for (auto& v : a[r]) v *= inv;
    b[r] *= inv;
    for (std::size_t q = 0; q < rows; ++q) {
      if (q == r || a[q][c] == 0) continue;
      Rational factor = a[q][c];
      for (std::size_t k = 0; k < cols; ++k) a[q][k] -= factor * a[r][k];
      b[q] -= factor * b[r];
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  for (std::size_t q = r; q < rows; ++q) {
    if (b[q] != 0) return false;
  }
  base.assign(cols, Rational(0));
  for (std::size_t i = 0; i < pivot_col.size(); ++i) base[static_cast<std::size_t>(pivot_col[i])] = b[i];
  directions.clear();
  for (std::size_t c = 0; c < cols; ++c) {
    if (std::find(pivot_col.begin(), pivot_col.end(), static_cast<int>(c)) != pivot_col.end()) continue;
    std::vector<Rational> d(cols, Rational(0));
    d[c] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) d[static_cast<std::size_t>(pivot_col[i])] = -a[i][c];
    directions.push_back(std::move(d));
  }
  return true;
}

Point to_point(const std::vector<Rational>& q) {
  Point p;
  for (const auto& v : q) p.push_back(v.get_d());
  return p;
}

std::string describe_fixed_set(const FixedSet& s, int n) {
  if (s.empty) return "no fixed points";
  std::string out = "{(";
  for (std::size_t i = 0; i < s.base.size(); ++i) out += (i ? ", " : "") + to_string(s.base[i]);
  out += ")";
  for (std::size_t k = 0; k < s.directions.size(); ++k) {
    out += " + t" + std::to_string(k + 1) + "*(";
    for (std::size_t i = 0; i < s.directions[k].size(); ++i) out += (i ? ", " : "") + to_string(s.directions[k][i]);
    out += ")";
  }
  (void)n;
  return out + "}";
}

}  // namespace

bool is_affine(const SmoothMap& m) {
  ExprMatrix j = jacobian(m);
  return std::all_of(j.entries().begin(), j.entries().end(), [](const Expr& e) { return e.is_constant(); });
}

FixedSet find_fixed_points(const SmoothMap& sigma, const DomainBox& box, int seeds_per_axis) {
  const int n = sigma.dimension();
  FixedSet out;
  if (is_affine(sigma)) {
    out.exact = true;
    ExprMatrix j = jacobian(sigma);
    std::vector<Rational> origin(static_cast<std::size_t>(n), Rational(0));
    std::vector<std::vector<Rational>> a(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
    std::vector<Rational> b(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) a[r][c] = j(r, c).value() - (r == c ? 1 : 0);
      auto offset = evaluate_exact(sigma[r], origin);
      b[static_cast<std::size_t>(r)] = offset ? Rational(-*offset) : Rational(0);
    }
    out.empty = !solve_affine(a, b, out.base, out.directions);
    if (!out.empty) {
      // Nearest point of the fixed set to the box center, for sampling.
      Point base = to_point(out.base);
      Point center = box.center();
      if (!out.directions.empty()) {
        Eigen::MatrixXd d(n, static_cast<Eigen::Index>(out.directions.size()));
        for (std::size_t k = 0; k < out.directions.size(); ++k) {
          for (int i = 0; i < n; ++i) d(i, static_cast<Eigen::Index>(k)) = out.directions[k][i].get_d();
        }
        Eigen::VectorXd delta(n);
        for (int i = 0; i < n; ++i) delta[i] = center[i] - base[i];
        Eigen::VectorXd t = d.completeOrthogonalDecomposition().solve(delta);
        Eigen::VectorXd p = d * t;
        for (int i = 0; i < n; ++i) base[i] += p[i];
      }
      if (box.contains(base)) out.points.push_back(base);
    }
    out.description = describe_fixed_set(out, n);
    return out;
  }

  std::vector<Expr> eqs;
  for (int i = 0; i < n; ++i) eqs.push_back(simplify(sigma[i] - Expr::variable(i + 1)));
  detail::NewtonSystem system(eqs, n);
  const std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
  detail::NewtonOptions nopt;
  nopt.tolerance = 1e-12;
  for (Point& seed : detail::grid_seeds(box, seeds_per_axis)) {
    detail::NewtonResult r = system.solve(std::move(seed), zero, nopt);
    if (r.converged && box.contains(r.root)) out.points.push_back(std::move(r.root));
  }
  detail::merge_points(out.points, 1e-6);
  std::sort(out.points.begin(), out.points.end());
  out.empty = out.points.empty();
  out.description = std::to_string(out.points.size()) + " numerical fixed point(s)";
  return out;
}

Verdict check_fixed_points_even_orders(const VectorField& f, const SmoothMap& sigma, const DomainBox& box, int max_j,
                                       double tolerance) {
  if (max_j < 0) throw std::invalid_argument("max_j must be nonnegative");
  const int n = f.dimension();
  FixedSet fixed = find_fixed_points(sigma, box);
  Verdict v;
  if (fixed.empty || fixed.points.empty()) {
    v.status = Status::inconclusive;
    v.note("no fixed point of the map in the box");
    return v;
  }
  v.note("fixed set " + fixed.description);
  DivergenceTower tower = build_tower(f, 2 * max_j);
  std::vector<Verdict> parts;
  for (int j = 0; j <= max_j; ++j) {
    const Expr& d = tower[2 * j];
    Verdict part;
    if (fixed.exact) {
      // Parametrize the fixed set by t1..tk and restrict D^(2j) to it.
      const std::size_t k = fixed.directions.size();
      std::vector<Expr> param;
      for (int i = 0; i < n; ++i) {
        Expr c = Expr::constant(fixed.base[static_cast<std::size_t>(i)]);
        for (std::size_t q = 0; q < k; ++q) {
          const Rational& coef = fixed.directions[q][static_cast<std::size_t>(i)];
          if (coef != 0) c = c + Expr::constant(coef) * Expr::variable(static_cast<int>(q) + 1);
        }
        param.push_back(c);
      }
      Expr restricted = compose(d, param);
      if (k == 0) {
        part.certainty = Certainty::certain;
        double value = 0.0;
        if (restricted.is_constant()) {
          value = restricted.value().get_d();
        } else {
          part.certainty = Certainty::probabilistic;
          value = evaluate(d, fixed.points.front());
        }
        part.residual_max = std::abs(value);
        part.samples = 1;
        if (restricted.is_zero() || (!restricted.is_constant() && std::abs(value) < tolerance)) {
          part.status = Status::holds;
        } else {
          part.status = Status::fails;
          part.add_witness(fixed.points.front(), std::abs(value));
        }
      } else {
        // Sample parameters over a cube reaching across the box.
        double reach = 0.0;
        for (const auto& a : box.axes()) reach += a.width() * a.width();
        reach = std::sqrt(reach);
        part = identically_zero(restricted, DomainBox::cube(static_cast<int>(k), -reach, reach));
        // Report witnesses in z coordinates.
        std::vector<Witness> ws = part.witnesses;
        part.witnesses.clear();
        for (const auto& w : ws) {
          Point z(static_cast<std::size_t>(n));
          for (int i = 0; i < n; ++i) {
            z[i] = fixed.base[i].get_d();
            for (std::size_t q = 0; q < k; ++q) z[i] += fixed.directions[q][i].get_d() * w.point[q];
          }
          part.add_witness(std::move(z), w.residual);
        }
      }
    } else {
      part.certainty = Certainty::probabilistic;
      for (const Point& p : fixed.points) {
        ++part.samples;
        try {
          double r = std::abs(evaluate(d, p));
          part.residual_max = std::max(part.residual_max, r);
          if (r >= tolerance) part.add_witness(p, r);
        } catch (const EvaluationError&) {
          ++part.skipped;
        }
      }
      part.status = part.skipped == part.samples ? Status::inconclusive
                    : part.residual_max < tolerance ? Status::holds
                                                   : Status::fails;
    }
    parts.push_back(std::move(part));
  }
  Verdict agg = combine(parts, "order 2*", 0);
  agg.note(v.notes);
  return agg;
}

Verdict check_level_set_invariance(const VectorField& f, const SmoothMap& sigma, CheckKind kind, int order,
                                   const std::vector<double>& levels, const DomainBox& box,
                                   const LevelSetOptions& options) {
  if (order < 0) throw std::invalid_argument("order must be nonnegative");
  const int n = f.dimension();
  DivergenceTower tower = build_tower(f, order);
  const Expr& d = tower[order];
  const CompiledExpr dc(d);
  std::vector<CompiledExpr> grad;
  for (int i = 1; i <= n; ++i) grad.emplace_back(differentiate(d, i));
  const CompiledMap map(sigma.components());
  const bool squared = kind == CheckKind::reversibility && order % 2 == 0;

  std::vector<Verdict> parts;
  std::mt19937_64 rng(options.seed);
  for (double level : levels) {
    Verdict v;
    v.certainty = Certainty::probabilistic;
    const double tol = 1e-6 * (1.0 + level * level);
    std::size_t on_set = 0;
    for (std::size_t s = 0; s < options.samples; ++s) {
      Point z = box.sample(rng);
      ++v.samples;
      bool ok = false;
      for (int it = 0; it < 50; ++it) {
        double value = dc(std::span<const double>(z)) - level;
        if (!std::isfinite(value)) break;
        if (std::abs(value) < options.on_tolerance) {
          ok = true;
          break;
        }
        double g2 = 0.0;
        Point g(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
          g[i] = grad[static_cast<std::size_t>(i)](std::span<const double>(z));
          g2 += g[i] * g[i];
        }
        if (!(g2 > 0) || !std::isfinite(g2)) break;
        for (int i = 0; i < n; ++i) z[i] -= value * g[i] / g2;
      }
      if (!ok || !box.contains(z)) {
        ++v.skipped;
        continue;
      }
      ++on_set;
      Point w = map(std::span<const double>(z));
      double image = dc(std::span<const double>(w));
      if (!std::isfinite(image)) {
        ++v.skipped;
        continue;
      }
      double r = squared ? std::abs(image * image - level * level) : std::abs(image - level);
      v.residual_max = std::max(v.residual_max, r);
      if (r >= tol) v.add_witness(std::move(z), r);
    }
    if (on_set == 0) {
      v.status = Status::inconclusive;
      v.note("level " + std::to_string(level) + " not reached in the box");
    } else {
      v.status = v.residual_max < tol ? Status::holds : Status::fails;
    }
    parts.push_back(std::move(v));
  }
  return combine(parts, "level ");
}

Verdict check_delta_noninvertibility(const VectorField& f, const Point& z0, const Selection& pi,
                                     const std::optional<SmoothMap>& sigma) {
  const int n = f.dimension();
  if (static_cast<int>(z0.size()) != n) throw DimensionError("point has the wrong dimension");
  Verdict v;
  v.samples = 1;
  if (sigma) {
    Point image = (*sigma)(z0);
    double moved = 0.0;
    for (int i = 0; i < n; ++i) moved = std::max(moved, std::abs(image[i] - z0[i]));
    if (moved >= 1e-8) {
      v.status = Status::inconclusive;
      v.residual_max = moved;
      v.note("point is not fixed by the map (moved by " + std::to_string(moved) + ")");
      return v;
    }
  }
  DivergenceTower tower = build_tower(f, pi.max());
  DeltaMap delta = delta_map(tower, pi);
  ExprMatrix j = jacobian(delta.map);
  std::vector<double> a = j.evaluate(z0);
  double bound = 1.0;
  for (int r = 0; r < n; ++r) {
    double row = 0.0;
    for (int c = 0; c < n; ++c) row += a[r * n + c] * a[r * n + c];
    bound *= std::sqrt(row);
  }
  double det = numeric_determinant(a, n);

  // Exact determinant when the point and the Jacobian are rational.
  std::optional<Rational> exact;
  if (n <= 4) {
    std::vector<Rational> zq;
    for (double x : z0) zq.emplace_back(x);
    exact = evaluate_exact(determinant(j), zq);
  }
  v.certainty = exact ? Certainty::certain : Certainty::probabilistic;
  if (exact) det = exact->get_d();
  v.residual_max = std::abs(det);
  bool singular = std::abs(det) <= 1e-8 * bound;
  v.status = singular ? Status::holds : Status::fails;
  if (!singular) v.add_witness(z0, std::abs(det));
  v.note("det J_Delta = " + std::to_string(det) + ", Hadamard bound " + std::to_string(bound));
  v.note("assumes the map is non-trivial near the point");
  return v;
}

}  // namespace symflow
