#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "symflow/field.hpp"

namespace symflow {

/// A tower entry outgrew the node budget.
class TowerBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A trajectory needed by a numerical routine left its box or hit a
/// singularity.
class FlowEscapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// orders[0] = div F, orders[j+1] = grad(orders[j]) . F.
struct DivergenceTower {
  VectorField field;
  std::vector<Expr> orders;

  int max_order() const noexcept { return static_cast<int>(orders.size()) - 1; }
  const Expr& operator[](int j) const { return orders.at(static_cast<std::size_t>(j)); }
};

struct TowerOptions {
  std::size_t node_budget = 100000;
};

DivergenceTower build_tower(const VectorField& f, int max_order, const TowerOptions& options = {});

/// Strictly increasing derivative orders pi(1) < ... < pi(n), each >= 0.
class Selection {
 public:
  /// Throws std::invalid_argument unless strictly increasing and
  /// nonnegative.
  explicit Selection(std::vector<int> entries);
  /// pi(j) = j - 1.
  static Selection leading(int n);

  int size() const noexcept { return static_cast<int>(entries_.size()); }
  int operator[](int j) const { return entries_.at(static_cast<std::size_t>(j)); }
  const std::vector<int>& entries() const noexcept { return entries_; }
  int max() const { return entries_.back(); }

 private:
  std::vector<int> entries_;
};

/// Diagonal entries (-1)^(pi(j)+1).
struct SignMatrix {
  std::vector<int> diagonal;
  int size() const noexcept { return static_cast<int>(diagonal.size()); }
};

SignMatrix sign_matrix(const Selection& pi);
SignMatrix identity_signs(int n);

/// Delta(z) = (D^(pi(1))(z), ..., D^(pi(n))(z)).
struct DeltaMap {
  Selection selection;
  SmoothMap map;
};

/// Throws std::out_of_range when pi asks for an order the tower lacks, and
/// DimensionError when |pi| differs from the field dimension.
DeltaMap delta_map(const DivergenceTower& tower, const Selection& pi);

/// Finite-difference estimate of d^j/dt^j D(phi(t, z)) at t = 0 from a
/// (2j+1)-point central stencil on an RK4 trajectory (long double).
/// Throws std::invalid_argument for j outside 0..4 or a step too small for
/// the stencil, FlowEscapeError when the trajectory leaves the domain.
double tower_fd_oracle(const VectorField& f, const Point& z, int order, double h = 1e-3);

/// Weights of the derivative of order `derivative` at 0 for the given
/// nodes (Fornberg's recurrence).
std::vector<long double> finite_difference_weights(const std::vector<long double>& nodes, int derivative);

}  // namespace symflow
