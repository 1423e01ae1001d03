#include "symflow/field.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "newton.hpp"
#include "symflow/algebra.hpp"
#include "symflow/evaluate.hpp"

namespace symflow {

ExprVector::ExprVector(std::vector<Expr> components, DomainBox domain) : domain_(std::move(domain)) {
  const int n = static_cast<int>(components.size());
  if (n < 1) throw DimensionError("a field or map needs at least one component");
  if (n != domain_.dimension()) {
    throw DimensionError(std::to_string(n) + " components but the domain box has dimension " +
                         std::to_string(domain_.dimension()));
  }
  components_.reserve(components.size());
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (max_variable_index(components[i]) > n) {
      throw DimensionError("component " + std::to_string(i + 1) + " uses a variable beyond dimension " +
                           std::to_string(n));
    }
    components_.push_back(simplify(components[i]));
  }
}

Point ExprVector::operator()(std::span<const double> z) const {
  Point out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(evaluate(c, z));
  return out;
}

SmoothMap SmoothMap::identity(const DomainBox& domain) {
  std::vector<Expr> c;
  for (int i = 1; i <= domain.dimension(); ++i) c.push_back(Expr::variable(i));
  return SmoothMap(std::move(c), domain);
}

std::vector<double> ExprMatrix::evaluate(std::span<const double> z) const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(symflow::evaluate(e, z));
  return out;
}

ExprMatrix jacobian(const ExprVector& m) {
  const int n = m.dimension();
  ExprMatrix j(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) j(r, c) = differentiate(m[r], c + 1);
  }
  return j;
}

namespace {

Expr cofactor_det(const ExprMatrix& m, std::vector<int>& rows, std::vector<int>& cols) {
  if (rows.size() == 1) return m(rows[0], cols[0]);
  Expr sum = Expr::constant(0);
  const int r = rows.front();
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const Expr& entry = m(r, cols[k]);
    if (entry.is_zero()) continue;
    std::vector<int> sub_cols;
    for (std::size_t q = 0; q < cols.size(); ++q) {
      if (q != k) sub_cols.push_back(cols[q]);
    }
    Expr term = entry * cofactor_det(m, sub_rows, sub_cols);
    sum = k % 2 == 0 ? sum + term : sum - term;
  }
  return sum;
}

}  // namespace

Expr determinant(const ExprMatrix& m) {
  if (m.size() < 1) throw std::invalid_argument("determinant of an empty matrix");
  if (m.size() > 4) throw std::invalid_argument("symbolic determinant is limited to n <= 4");
  std::vector<int> idx(static_cast<std::size_t>(m.size()));
  for (int i = 0; i < m.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
  std::vector<int> cols = idx;
  return simplify(cofactor_det(m, idx, cols));
}

double numeric_determinant(std::span<const double> row_major, int n) {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(row_major.data(), n, n);
  return Eigen::MatrixXd(a).partialPivLu().determinant();
}

Expr divergence(const VectorField& f) {
  Expr sum = Expr::constant(0);
  for (int i = 0; i < f.dimension(); ++i) sum = sum + differentiate(f[i], i + 1);
  return simplify(sum);
}

Expr lie_derivative(const Expr& e, const VectorField& f) {
  if (max_variable_index(e) > f.dimension()) {
    throw DimensionError("expression uses a variable beyond the field dimension " + std::to_string(f.dimension()));
  }
  Expr sum = Expr::constant(0);
  for (int i = 0; i < f.dimension(); ++i) {
    Expr d = differentiate(e, i + 1);
    if (!d.is_zero()) sum = sum + d * f[i];
  }
  return simplify(sum);
}

std::vector<Expr> compose_map(const ExprVector& outer, const ExprVector& inner) {
  std::vector<Expr> out;
  out.reserve(outer.components().size());
  for (const auto& c : outer.components()) out.push_back(compose(c, inner.components()));
  return out;
}

Verdict is_involution(const SmoothMap& m, const DomainBox& box, const ZeroTestOptions& options) {
  std::vector<Expr> twice = compose_map(m, m);
  std::vector<Verdict> parts;
  for (int i = 0; i < m.dimension(); ++i) {
    ZeroTestOptions o = options;
    o.seed = options.seed + static_cast<std::uint64_t>(i);
    parts.push_back(identically_zero(twice[static_cast<std::size_t>(i)] - Expr::variable(i + 1), box, o));
  }
  return combine(parts, "component ");
}

Verdict is_measure_preserving(const SmoothMap& m, const DomainBox& box, const ZeroTestOptions& options) {
  const int n = m.dimension();
  ExprMatrix j = jacobian(m);
  if (n <= 4) {
    Expr det = determinant(j);
    Verdict v = identically_zero(det * det - Expr::constant(1), box, options);
    v.note("det J = " + to_string(det, n));
    return v;
  }
  Verdict v;
  v.certainty = Certainty::probabilistic;
  std::mt19937_64 rng(options.seed);
  const double tol = options.tolerance.value_or(1e-9);
  for (std::size_t t = 0; t < options.trials; ++t) {
    Point p = box.sample(rng);
    ++v.samples;
    try {
      std::vector<double> a = j.evaluate(p);
      double r = std::abs(std::abs(numeric_determinant(a, n)) - 1.0);
      v.residual_max = std::max(v.residual_max, r);
      if (r >= tol) v.add_witness(std::move(p), r);
    } catch (const EvaluationError&) {
      ++v.skipped;
    }
  }
  if (v.skipped == v.samples) {
    v.status = Status::inconclusive;
  } else {
    v.status = v.residual_max < tol ? Status::holds : Status::fails;
  }
  v.note("det J sampled numerically (n > 4)");
  return v;
}

CriticalPointInventory find_critical_points(const VectorField& f, const CriticalPointOptions& options) {
  const int n = f.dimension();
  detail::NewtonSystem system(f.components(), n);
  detail::NewtonOptions nopt;
  nopt.max_iterations = options.max_iterations;
  nopt.tolerance = options.tolerance;
  const std::vector<double> zero(static_cast<std::size_t>(n), 0.0);

  CriticalPointInventory out;
  std::vector<Point> roots;
  for (Point& seed : detail::grid_seeds(f.domain(), options.seeds_per_axis)) {
    ++out.seeds;
    detail::NewtonResult r = system.solve(std::move(seed), zero, nopt);
    if (!r.converged) {
      ++out.not_converged;
      continue;
    }
    if (f.domain().contains(r.root)) roots.push_back(std::move(r.root));
  }
  detail::merge_points(roots, options.merge_radius);
  std::sort(roots.begin(), roots.end());

  Eigen::VectorXd res;
  Eigen::MatrixXd jac;
  for (Point& p : roots) {
    CriticalPoint c;
    system.residual(p, zero, res);
    c.residual = res.norm();
    system.jacobian(p, jac);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const auto& sv = svd.singularValues();
    c.nonsingular = sv.size() > 0 && sv[sv.size() - 1] > 1e-8 * sv[0];
    c.point = std::move(p);
    out.points.push_back(std::move(c));
  }
  return out;
}

}  // namespace symflow
