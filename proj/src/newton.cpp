#include "newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "symflow/algebra.hpp"

namespace symflow::detail {

NewtonSystem::NewtonSystem(std::span<const Expr> equations, int unknowns) : n_(unknowns), g_(equations) {
  jac_.reserve(equations.size() * static_cast<std::size_t>(unknowns));
  for (const Expr& e : equations) {
    for (int j = 1; j <= unknowns; ++j) jac_.emplace_back(differentiate(e, j));
  }
}

bool NewtonSystem::residual(std::span<const double> w, std::span<const double> target, Eigen::VectorXd& r) const {
  r.resize(equations());
  for (int i = 0; i < equations(); ++i) {
    r[i] = g_[static_cast<std::size_t>(i)](w) - target[static_cast<std::size_t>(i)];
    if (!std::isfinite(r[i])) return false;
  }
  return true;
}

void NewtonSystem::jacobian(std::span<const double> w, Eigen::MatrixXd& j) const {
  j.resize(equations(), n_);
  for (int i = 0; i < equations(); ++i) {
    for (int k = 0; k < n_; ++k) j(i, k) = jac_[static_cast<std::size_t>(i * n_ + k)](w);
  }
}

NewtonResult NewtonSystem::solve(Point start, std::span<const double> target, const NewtonOptions& options) const {
  NewtonResult out;
  out.root = std::move(start);
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  if (!residual(out.root, target, r)) {
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }
  double norm = r.norm();
  Point trial(out.root.size());
  Eigen::VectorXd r_trial;
  for (int it = 0; it < options.max_iterations; ++it) {
    if (norm == 0.0) break;
    jacobian(out.root, j);
    if (!j.allFinite()) break;
    Eigen::VectorXd step = j.completeOrthogonalDecomposition().solve(-r);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool improved = false;
    for (int h = 0; h <= options.max_halvings; ++h, lambda *= 0.5) {
      for (std::size_t k = 0; k < trial.size(); ++k) trial[k] = out.root[k] + lambda * step[static_cast<Eigen::Index>(k)];
      if (residual(trial, target, r_trial) && r_trial.norm() < norm) {
        improved = true;
        break;
      }
    }
    if (!improved) break;
    out.root = trial;
    r = r_trial;
    norm = r.norm();
    out.iterations = it + 1;
    if (norm < options.tolerance && lambda * step.norm() < options.step_tolerance * (1.0 + Eigen::Map<const Eigen::VectorXd>(out.root.data(), n_).norm())) {
      break;
    }
  }
  out.residual = norm;
  out.converged = norm < options.tolerance;
  return out;
}

void merge_points(std::vector<Point>& points, double radius) {
  std::vector<Point> kept;
  for (auto& p : points) {
    bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const Point& q) {
      double d = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) d = std::max(d, std::abs(p[i] - q[i]));
      return d < radius;
    });
    if (!duplicate) kept.push_back(std::move(p));
  }
  points = std::move(kept);
}

std::vector<Point> grid_seeds(const DomainBox& box, int per_axis) {
  const int n = box.dimension();
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_axis);
  std::vector<Point> out;
  out.reserve(total);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t c = 0; c < total; ++c) {
    Point p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const Interval& a = box.axis(i);
      p[static_cast<std::size_t>(i)] = a.lo + (idx[static_cast<std::size_t>(i)] + 0.5) * a.width() / per_axis;
    }
    out.push_back(std::move(p));
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[static_cast<std::size_t>(i)] < per_axis) break;
      idx[static_cast<std::size_t>(i)] = 0;
    }
  }
  return out;
}

}  // namespace symflow::detail
