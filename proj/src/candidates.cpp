#include "symflow/candidates.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>

#include "newton.hpp"
#include "symflow/algebra.hpp"
#include "symflow/checks.hpp"

namespace symflow {

namespace {

double max_norm(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double euclid(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(d);
}

// Delta map, its Jacobian and the target S Delta(z) for one (F, pi, kind).
class DeltaSolver {
 public:
  DeltaSolver(const VectorField& f, const Selection& pi, CheckKind kind, const CandidateOptions& options)
      : n_(f.dimension()),
        tower_(build_tower(f, pi.max())),
        delta_(delta_map(tower_, pi)),
        system_(delta_.map.components(), n_),
        field_(f.components()),
        search_(options.search_box.value_or(f.domain())),
        options_(options) {
    signs_ = kind == CheckKind::reversibility ? sign_matrix(pi).diagonal : identity_signs(n_).diagonal;
    nopt_.max_iterations = options.max_iterations;
    nopt_.tolerance = options.newton_tol;
    seeds_ = detail::grid_seeds(search_, options.multistart);
  }

  int dimension() const { return n_; }
  const DomainBox& search_box() const { return search_; }

  std::optional<std::vector<double>> target(const Point& z) const {
    Eigen::VectorXd d;
    std::vector<double> zero(static_cast<std::size_t>(n_), 0.0);
    if (!system_.residual(z, zero, d)) return std::nullopt;
    std::vector<double> t(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) t[static_cast<std::size_t>(i)] = signs_[static_cast<std::size_t>(i)] * d[i];
    return t;
  }

  /// max |Delta(w) - S Delta(z)|.
  double root_residual(const Point& z, const Point& w) const {
    auto tz = target(z);
    auto tw = target(w);
    if (!tz || !tw) return std::numeric_limits<double>::infinity();
    double r = 0.0;
    for (int a = 0; a < n_; ++a) {
      const double s = signs_[static_cast<std::size_t>(a)];
      r = std::max(r, std::abs(s * (*tw)[static_cast<std::size_t>(a)] - (*tz)[static_cast<std::size_t>(a)]));
    }
    return r;
  }

  Eigen::MatrixXd delta_jacobian(const Point& z) const {
    Eigen::MatrixXd j;
    system_.jacobian(z, j);
    return j;
  }

  bool singular(const Point& z) const {
    Eigen::MatrixXd j = delta_jacobian(z);
    if (!j.allFinite()) return true;
    double bound = 1.0;
    for (int i = 0; i < n_; ++i) bound *= j.row(i).norm();
    return !(std::abs(j.determinant()) > 1e-8 * bound) || bound == 0.0;
  }

  /// J_sigma = J_Delta(w)^-1 S J_Delta(z).
  std::optional<Eigen::MatrixXd> implicit_jacobian(const Point& z, const Point& w) const {
    if (singular(w)) return std::nullopt;
    Eigen::MatrixXd jz = delta_jacobian(z);
    for (int i = 0; i < n_; ++i) jz.row(i) *= signs_[static_cast<std::size_t>(i)];
    return Eigen::MatrixXd(delta_jacobian(w).partialPivLu().solve(jz));
  }

  std::optional<detail::NewtonResult> solve(const Point& start, const std::vector<double>& target) const {
    detail::NewtonResult r = system_.solve(start, target, nopt_);
    if (!r.converged || !search_.contains(r.root)) return std::nullopt;
    return r;
  }

  std::vector<CandidateRoot> roots(const Point& z, const std::vector<Point>& extra) const {
    std::vector<CandidateRoot> out;
    auto t = target(z);
    if (!t) return out;
    std::vector<Point> found;
    std::vector<double> residuals;
    auto attempt = [&](const Point& seed) {
      if (auto r = solve(seed, *t)) {
        found.push_back(r->root);
        residuals.push_back(r->residual);
      }
    };
    for (const auto& s : extra) attempt(s);
    for (const auto& s : seeds_) attempt(s);
    std::vector<Point> kept;
    for (std::size_t i = 0; i < found.size(); ++i) {
      bool dup = std::any_of(kept.begin(), kept.end(), [&](const Point& q) { return max_norm(q, found[i]) < 1e-6; });
      if (dup) continue;
      kept.push_back(found[i]);
      out.push_back({found[i], residuals[i], max_norm(found[i], z) < 1e-6});
    }
    std::sort(out.begin(), out.end(), [](const CandidateRoot& a, const CandidateRoot& b) { return a.point < b.point; });
    return out;
  }

  Point field_at(const Point& z) const { return field_(std::span<const double>(z)); }

 private:
  int n_;
  DivergenceTower tower_;
  DeltaMap delta_;
  detail::NewtonSystem system_;
  CompiledMap field_;
  DomainBox search_;
  CandidateOptions options_;
  std::vector<int> signs_;
  detail::NewtonOptions nopt_;
  std::vector<Point> seeds_;
};

struct BranchState {
  std::vector<std::optional<Point>> value;
  std::vector<std::optional<Eigen::MatrixXd>> jac;
  BranchSummary summary;
  Point worst;  // grid point with the largest structural residual
};

}  // namespace

std::vector<CandidateRoot> candidate_from_delta(const VectorField& f, const Selection& pi, CheckKind kind,
                                                const Point& z, const CandidateOptions& options) {
  if (static_cast<int>(z.size()) != f.dimension()) throw DimensionError("point has the wrong dimension");
  DeltaSolver solver(f, pi, kind, options);
  if (solver.singular(z)) throw CandidateError("J_Delta is singular at the given point");
  std::vector<CandidateRoot> roots = solver.roots(z, {z});
  if (roots.empty()) throw CandidateError("no Newton start converged");
  return roots;
}

std::optional<Rational> rationalize(double x, long max_den, double tol) {
  if (!std::isfinite(x)) return std::nullopt;
  // Continued fraction convergents.
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    double a = std::floor(r);
    if (std::abs(a) > 1e12) break;
    long ai = static_cast<long>(a);
    long p2 = ai * p1 + p0;
    long q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - x) <= tol) return make_rational(p1, q1);
    double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  if (q1 > 0 && std::abs(static_cast<double>(p1) / static_cast<double>(q1) - x) <= tol) return make_rational(p1, q1);
  return std::nullopt;
}

CandidatePointMap candidate_map_table(const VectorField& f, const Selection& pi, CheckKind kind,
                                      const TableOptions& options) {
  const int n = f.dimension();
  if (options.grid.dimension() != n) throw DimensionError("grid and field dimensions differ");
  if (options.per_axis < 1) throw std::invalid_argument("grid needs at least one point per axis");
  DeltaSolver solver(f, pi, kind, options.solver);

  CandidatePointMap out;
  out.selection = pi;
  out.kind = kind;
  const std::vector<Point> grid = detail::grid_seeds(options.grid, options.per_axis);
  const std::size_t count = grid.size();
  out.grid_points = count;
  out.table.resize(count);
  std::vector<bool> singular(count, false);
  for (std::size_t i = 0; i < count; ++i) {
    out.table[i].index = i;
    out.table[i].z = grid[i];
    singular[i] = solver.singular(grid[i]) || !solver.target(grid[i]);
    out.table[i].singular = singular[i];
    if (singular[i]) ++out.singular_points;
  }
  const std::size_t regular = count - out.singular_points;
  out.verdict.certainty = Certainty::probabilistic;
  if (regular == 0) {
    out.verdict.status = Status::inconclusive;
    out.verdict.note("J_Delta is singular on the whole grid");
    return out;
  }

  // Multi-index helpers, last axis fastest.
  const auto k = static_cast<std::size_t>(options.per_axis);
  auto neighbors = [&](std::size_t idx) {
    std::vector<std::size_t> nb;
    std::size_t stride = 1;
    for (int axis = n - 1; axis >= 0; --axis) {
      std::size_t coord = (idx / stride) % k;
      if (coord > 0) nb.push_back(idx - stride);
      if (coord + 1 < k) nb.push_back(idx + stride);
      stride *= k;
    }
    return nb;
  };

  const Point anchor_target = options.anchor.value_or(options.grid.center());
  std::size_t anchor = count;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    if (singular[i]) continue;
    double d = euclid(grid[i], anchor_target);
    if (d < best) {
      best = d;
      anchor = i;
    }
  }

  // Breadth-first order over regular points reachable from the anchor.
  std::vector<std::size_t> order;
  std::vector<bool> seen(count, false);
  std::deque<std::size_t> queue{anchor};
  seen[anchor] = true;
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    order.push_back(i);
    for (std::size_t j : neighbors(i)) {
      if (!seen[j] && !singular[j]) {
        seen[j] = true;
        queue.push_back(j);
      }
    }
  }

  const bool symmetry = kind == CheckKind::symmetry;
  std::vector<BranchState> branches;
  std::vector<bool> processed(count, false);
  for (std::size_t i : order) {
    const Point& z = grid[i];
    std::vector<std::optional<Point>> predictions(branches.size());
    std::vector<double> scale(branches.size(), 0.0);
    std::vector<Point> extra{z};
    for (std::size_t b = 0; b < branches.size(); ++b) {
      for (std::size_t q : neighbors(i)) {
        if (!processed[q] || !branches[b].value[q] || !branches[b].jac[q]) continue;
        const Eigen::MatrixXd& j = *branches[b].jac[q];
        Eigen::VectorXd dz(n);
        for (int a = 0; a < n; ++a) dz[a] = z[a] - grid[q][a];
        Eigen::VectorXd step = j * dz;
        Point p = *branches[b].value[q];
        for (int a = 0; a < n; ++a) p[a] += step[a];
        predictions[b] = p;
        scale[b] = step.norm() + dz.norm();
        extra.push_back(p);
        break;
      }
    }
    std::vector<CandidateRoot> roots = solver.roots(z, extra);
    if (roots.empty()) ++out.newton_failures;
    if (symmetry) {
      bool had_trivial = std::any_of(roots.begin(), roots.end(), [](const CandidateRoot& r) { return r.trivial; });
      std::erase_if(roots, [](const CandidateRoot& r) { return r.trivial; });
      if (i == anchor && roots.empty() && had_trivial) out.trivial_only = true;
    }
    if (i == anchor) {
      for (const auto& r : roots) {
        BranchState s;
        s.value.assign(count, std::nullopt);
        s.jac.assign(count, std::nullopt);
        s.summary.id = static_cast<int>(branches.size());
        s.value[i] = r.point;
        s.jac[i] = solver.implicit_jacobian(z, r.point);
        ++s.summary.assigned;
        branches.push_back(std::move(s));
      }
    } else {
      for (std::size_t b = 0; b < branches.size(); ++b) {
        if (!predictions[b] || roots.empty()) continue;
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = d1;
        std::size_t pick = 0;
        for (std::size_t r = 0; r < roots.size(); ++r) {
          double d = euclid(roots[r].point, *predictions[b]);
          if (d < d1) {
            d2 = d1;
            d1 = d;
            pick = r;
          } else if (d < d2) {
            d2 = d;
          }
        }
        if (d1 > std::max(1e-6, 0.5 * scale[b])) continue;  // branch lost here
        if (d2 < 2 * d1 && d1 > 1e-9) ++branches[b].summary.switches;
        branches[b].value[i] = roots[pick].point;
        branches[b].jac[i] = solver.implicit_jacobian(z, roots[pick].point);
        ++branches[b].summary.assigned;
      }
    }
    processed[i] = true;
  }

  if (branches.empty()) {
    out.verdict.status = Status::inconclusive;
    out.verdict.note(out.trivial_only ? "only the trivial identity branch exists"
                                      : "no root of the Delta equation at the anchor point");
    return out;
  }

  // Involution consistency and structural residual per branch.
  std::vector<std::vector<double>> inv_error(branches.size(), std::vector<double>(count, -1.0));
  double field_scale = 0.0;
  for (std::size_t b = 0; b < branches.size(); ++b) {
    BranchState& s = branches[b];
    for (std::size_t i = 0; i < count; ++i) {
      if (!s.value[i]) continue;
      const Point& z = grid[i];
      const Point& w = *s.value[i];
      // Map w back: the branch value at w predicted from the nearest grid
      // point of the same branch, polished by Newton.
      std::size_t g = count;
      double gd = std::numeric_limits<double>::infinity();
      for (std::size_t q = 0; q < count; ++q) {
        if (!s.value[q] || !s.jac[q]) continue;
        double d = euclid(grid[q], w);
        if (d < gd) {
          gd = d;
          g = q;
        }
      }
      double err = std::numeric_limits<double>::infinity();
      if (g < count) {
        Eigen::VectorXd dz(n);
        for (int a = 0; a < n; ++a) dz[a] = w[a] - grid[g][a];
        Eigen::VectorXd step = *s.jac[g] * dz;
        Point u0 = *s.value[g];
        for (int a = 0; a < n; ++a) u0[a] += step[a];
        if (auto tw = solver.target(w)) {
          if (auto u = solver.solve(u0, *tw)) err = max_norm(u->root, z);
        }
      }
      inv_error[b][i] = err;
      if (err < options.involution_tol) ++s.summary.consistent;
      if (s.jac[i]) {
        Point fz = solver.field_at(z);
        Point fw = solver.field_at(w);
        Eigen::VectorXd jf = *s.jac[i] * Eigen::Map<const Eigen::VectorXd>(fz.data(), n);
        double r = 0.0;
        for (int a = 0; a < n; ++a) r = std::max(r, std::abs(symmetry ? fw[a] - jf[a] : fw[a] + jf[a]));
        if (!std::isfinite(r)) continue;
        if (s.worst.empty() || r > s.summary.structural_residual) {
          s.summary.structural_residual = r;
          s.worst = z;
        }
        for (double v : fz) field_scale = std::max(field_scale, std::abs(v));
      }
    }
    out.branches.push_back(s.summary);
  }

  int chosen = -1;
  for (const auto& s : out.branches) {
    if (static_cast<double>(s.consistent) < 0.8 * static_cast<double>(regular)) continue;
    if (chosen < 0 || s.structural_residual < out.branches[static_cast<std::size_t>(chosen)].structural_residual) {
      chosen = s.id;
    }
  }
  if (chosen < 0) {
    out.verdict.status = Status::inconclusive;
    out.verdict.note("no involution-consistent branch on at least 80% of the regular grid points");
    return out;
  }
  out.chosen_branch = chosen;
  const BranchState& s = branches[static_cast<std::size_t>(chosen)];
  out.branch_switches = s.summary.switches;
  double delta_residual = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    CandidateEntry& e = out.table[i];
    if (!s.value[i]) continue;
    e.branch = chosen;
    e.image = *s.value[i];
    e.involution_error = inv_error[static_cast<std::size_t>(chosen)][i];
    e.consistent = e.involution_error < options.involution_tol;
    e.residual = solver.root_residual(grid[i], e.image);
    if (e.consistent) {
      ++out.consistent_points;
      delta_residual = std::max(delta_residual, e.residual);
    }
  }
  out.verdict.samples = count;
  out.verdict.skipped = out.singular_points;
  out.verdict.residual_max = s.summary.structural_residual;
  out.verdict.note("branch " + std::to_string(chosen) + " of " + std::to_string(branches.size()) +
                   " chosen, Delta residual " + short_number(delta_residual));
  // Every branch of the Delta relation maps back onto itself, so the
  // structural identity is what separates a reversibility or symmetry.
  if (s.summary.structural_residual <= 1e-6 * (1 + field_scale)) {
    out.verdict.status = Status::holds;
  } else {
    out.verdict.status = Status::fails;
    out.verdict.add_witness(s.worst, s.summary.structural_residual);
    out.verdict.note("no involution-consistent branch satisfies the structural identity");
  }

  // Affine fit over the consistent entries.
  std::vector<const CandidateEntry*> rows;
  for (const auto& e : out.table) {
    if (e.consistent) rows.push_back(&e);
  }
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), n + 1);
  Eigen::MatrixXd b(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < n; ++c) {
      a(static_cast<Eigen::Index>(r), c) = rows[r]->z[c];
      b(static_cast<Eigen::Index>(r), c) = rows[r]->image[c];
    }
    a(static_cast<Eigen::Index>(r), n) = 1.0;
  }
  Eigen::MatrixXd coef = a.completeOrthogonalDecomposition().solve(b);
  std::vector<Expr> comps;
  bool rational = true;
  for (int c = 0; c < n && rational; ++c) {
    Expr e = Expr::constant(0);
    for (int j = 0; j <= n; ++j) {
      auto q = rationalize(coef(j, c));
      if (!q) {
        rational = false;
        break;
      }
      if (*q == 0) continue;
      e = e + (j < n ? Expr::constant(*q) * Expr::variable(j + 1) : Expr::constant(*q));
    }
    comps.push_back(e);
  }
  if (!rational) {
    out.verdict.note("branch has no affine rational fit");
    return out;
  }
  SmoothMap fitted(comps, f.domain());
  double fit = 0.0;
  for (const auto* e : rows) {
    try {
      fit = std::max(fit, max_norm(fitted(e->z), e->image));
    } catch (const EvaluationError&) {
      fit = std::numeric_limits<double>::infinity();
    }
  }
  out.fit_residual = fit;
  if (fit > 1e-6) {
    out.verdict.note("branch is not affine (fit residual " + short_number(fit) + ")");
    return out;
  }
  out.fitted = fitted;
  out.fitted_check = check_structural(f, fitted, kind, f.domain());
  return out;
}

void write_candidate_csv(std::ostream& os, const CandidatePointMap& m, int dimension) {
  os << "index";
  for (int i = 1; i <= dimension; ++i) os << ',' << variable_name(i, dimension);
  for (int i = 1; i <= dimension; ++i) os << ",image_" << variable_name(i, dimension);
  os << ",branch,residual\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (const auto& e : m.table) {
    os << e.index;
    for (double v : e.z) {
      os << ',';
      put(v);
    }
    for (int i = 0; i < dimension; ++i) {
      os << ',';
      if (!e.image.empty()) put(e.image[static_cast<std::size_t>(i)]);
    }
    os << ',' << e.branch << ',';
    if (!e.image.empty()) put(e.residual);
    os << '\n';
  }
}

}  // namespace symflow
