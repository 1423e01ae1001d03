#pragma once

// Damped Newton on compiled symbolic systems. Internal to the library.

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "symflow/evaluate.hpp"
#include "symflow/expr.hpp"
#include "symflow/verdict.hpp"

namespace symflow::detail {

struct NewtonOptions {
  int max_iterations = 50;
  double tolerance = 1e-10;
  double step_tolerance = 1e-14;
  int max_halvings = 30;
};

struct NewtonResult {
  Point root;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Solves G(w) = target for m equations in n unknowns. Steps are minimum
/// norm least-squares solutions, so singular and rectangular systems are
/// handled (the iteration then lands on the nearest point of the solution
/// set to first order).
class NewtonSystem {
 public:
  NewtonSystem(std::span<const Expr> equations, int unknowns);

  int equations() const noexcept { return static_cast<int>(g_.size()); }
  int unknowns() const noexcept { return n_; }

  /// r = G(w) - target; false when any entry is not finite.
  bool residual(std::span<const double> w, std::span<const double> target, Eigen::VectorXd& r) const;
  void jacobian(std::span<const double> w, Eigen::MatrixXd& j) const;

  NewtonResult solve(Point start, std::span<const double> target, const NewtonOptions& options = {}) const;

 private:
  int n_ = 0;
  CompiledMap g_;
  std::vector<CompiledExpr> jac_;  // row-major m x n
};

/// Merges points closer than radius (max-norm), keeping the first seen.
void merge_points(std::vector<Point>& points, double radius);

/// Cell-centred grid of k points per axis over the box, row-major.
std::vector<Point> grid_seeds(const DomainBox& box, int per_axis);

}  // namespace symflow::detail
