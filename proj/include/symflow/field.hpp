#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "symflow/expr.hpp"
#include "symflow/verdict.hpp"

namespace symflow {

/// n expressions in z_1..z_n over a box. Shared shape of vector fields and
/// maps. Components are stored simplified.
class ExprVector {
 public:
  ExprVector() = default;
  /// Throws DimensionError when the component count differs from the box
  /// dimension or a component uses a variable beyond n.
  ExprVector(std::vector<Expr> components, DomainBox domain);

  int dimension() const noexcept { return static_cast<int>(components_.size()); }
  const std::vector<Expr>& components() const noexcept { return components_; }
  const Expr& operator[](int i) const { return components_.at(static_cast<std::size_t>(i)); }
  const DomainBox& domain() const noexcept { return domain_; }

  Point operator()(std::span<const double> z) const;

 private:
  std::vector<Expr> components_;
  DomainBox domain_;
};

/// Right-hand side F of z' = F(z).
class VectorField : public ExprVector {
 public:
  using ExprVector::ExprVector;
};

/// A transformation z -> m(z), typically a candidate involution.
class SmoothMap : public ExprVector {
 public:
  using ExprVector::ExprVector;
  static SmoothMap identity(const DomainBox& domain);
  static SmoothMap from(const ExprVector& v) { return SmoothMap(v.components(), v.domain()); }
};

/// Square matrix of expressions, row-major.
class ExprMatrix {
 public:
  ExprMatrix() = default;
  explicit ExprMatrix(int n) : n_(n), entries_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {}

  int size() const noexcept { return n_; }
  Expr& operator()(int i, int j) { return entries_[index(i, j)]; }
  const Expr& operator()(int i, int j) const { return entries_[index(i, j)]; }
  const std::vector<Expr>& entries() const noexcept { return entries_; }

  /// Numeric value at z, row-major.
  std::vector<double> evaluate(std::span<const double> z) const;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }
  int n_ = 0;
  std::vector<Expr> entries_;
};

/// Entry (i, j) = d m_i / d z_j, simplified.
ExprMatrix jacobian(const ExprVector& m);

/// Symbolic determinant by cofactor expansion. Throws std::invalid_argument
/// for n > 4.
Expr determinant(const ExprMatrix& m);

/// Numeric determinant by LU of a row-major n x n matrix.
double numeric_determinant(std::span<const double> row_major, int n);

Expr divergence(const VectorField& f);

/// grad(e) . F, simplified.
Expr lie_derivative(const Expr& e, const VectorField& f);

/// Componentwise m(z) for m, substituted and simplified.
std::vector<Expr> compose_map(const ExprVector& outer, const ExprVector& inner);

/// Tests m(m(z)) = z on the box.
Verdict is_involution(const SmoothMap& m, const DomainBox& box, const ZeroTestOptions& options = {});

/// Tests |det J_m| = 1 on the box via (det J_m)^2 - 1. The determinant is
/// recorded in the verdict notes. For n > 4 the determinant is sampled
/// numerically.
Verdict is_measure_preserving(const SmoothMap& m, const DomainBox& box, const ZeroTestOptions& options = {});

struct CriticalPointOptions {
  int seeds_per_axis = 8;
  int max_iterations = 50;
  double tolerance = 1e-10;
  double merge_radius = 1e-6;
};

struct CriticalPoint {
  Point point;
  double residual = 0.0;
  /// Jacobian of F is numerically nonsingular here (isolated root).
  bool nonsingular = true;
};

struct CriticalPointInventory {
  std::vector<CriticalPoint> points;  // sorted lexicographically
  std::size_t seeds = 0;
  std::size_t not_converged = 0;
};

/// Damped Newton from cell-centred grid seeds; roots inside the domain box
/// with |F| < tolerance, merged within merge_radius.
CriticalPointInventory find_critical_points(const VectorField& f, const CriticalPointOptions& options = {});

}  // namespace symflow
