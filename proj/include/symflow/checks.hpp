#pragma once

#include <optional>
#include <string>
#include <vector>

#include "symflow/field.hpp"
#include "symflow/tower.hpp"
#include "symflow/verdict.hpp"

namespace symflow {

/// Residual vector F(sigma(z)) -+ J_sigma(z) F(z): minus for symmetry,
/// plus for reversibility. Zero iff the relation holds.
std::vector<Expr> structural_residual(const VectorField& f, const SmoothMap& sigma, CheckKind kind);

/// Tests the Jacobian characterization of a symmetry or reversibility.
Verdict check_structural(const VectorField& f, const SmoothMap& sigma, CheckKind kind, const DomainBox& box,
                         const ZeroTestOptions& options = {});

/// s_j = 1 for symmetries, (-1)^(j+1) for reversibilities.
int tower_sign(CheckKind kind, int order);

struct TowerTransformReport {
  Verdict verdict;             // aggregate
  std::vector<Verdict> orders;  // per order 0..max_order
  std::vector<int> signs;
  DivergenceTower tower;
};

/// Tests D^(j)(sigma(z)) = s_j D^(j)(z) for j = 0..max_order.
TowerTransformReport check_tower_transform(const VectorField& f, const SmoothMap& sigma, CheckKind kind,
                                           int max_order, const DomainBox& box,
                                           const ZeroTestOptions& options = {},
                                           const TowerOptions& tower_options = {});

/// Fixed set of a map. For affine maps it is solved exactly as
/// base + span(directions); otherwise `points` holds Newton roots.
struct FixedSet {
  bool exact = false;
  bool empty = false;
  std::vector<Rational> base;
  std::vector<std::vector<Rational>> directions;
  std::vector<Point> points;
  std::string description;
};

/// True when every component is affine in z (constant Jacobian).
bool is_affine(const SmoothMap& m);

FixedSet find_fixed_points(const SmoothMap& sigma, const DomainBox& box, int seeds_per_axis = 6);

/// Evaluates D^(2j), j = 0..max_j, on the fixed set of sigma. Exact on
/// affine fixed sets, sampled at Newton roots otherwise. Inconclusive when
/// no fixed point lies in the box.
Verdict check_fixed_points_even_orders(const VectorField& f, const SmoothMap& sigma, const DomainBox& box,
                                       int max_j, double tolerance = 1e-10);

struct LevelSetOptions {
  std::size_t samples = 64;
  double on_tolerance = 1e-8;
  std::uint64_t seed = 0;
};

/// Projects sampled points onto {D^(j) = L} and checks that sigma maps them
/// back onto the level set (or onto |D^(j)| = |L| for even orders of a
/// reversibility).
Verdict check_level_set_invariance(const VectorField& f, const SmoothMap& sigma, CheckKind kind, int order,
                                   const std::vector<double>& levels, const DomainBox& box,
                                   const LevelSetOptions& options = {});

/// Tests that J_Delta is singular at z0: |det| <= 1e-8 times the Hadamard
/// bound of the matrix. When sigma is given, z0 must be a fixed point.
Verdict check_delta_noninvertibility(const VectorField& f, const Point& z0, const Selection& pi,
                                     const std::optional<SmoothMap>& sigma = std::nullopt);

}  // namespace symflow
