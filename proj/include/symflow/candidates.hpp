#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "symflow/field.hpp"
#include "symflow/tower.hpp"
#include "symflow/verdict.hpp"

namespace symflow {

/// The Delta inversion could not be attempted or produced no root.
class CandidateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CandidateOptions {
  int multistart = 5;  // seeds per axis
  double newton_tol = 1e-10;
  int max_iterations = 100;
  /// Box in which roots are sought; defaults to the field's domain.
  std::optional<DomainBox> search_box;
};

struct CandidateRoot {
  Point point;
  double residual = 0.0;
  bool trivial = false;  // the root w = z
};

/// All roots w of Delta(w) = S Delta(z), S the sign matrix of pi for a
/// reversibility and the identity for a symmetry, found by damped Newton
/// from a seed grid. Sorted lexicographically. Throws CandidateError when
/// J_Delta is singular at z or nothing converged.
std::vector<CandidateRoot> candidate_from_delta(const VectorField& f, const Selection& pi, CheckKind kind,
                                                const Point& z, const CandidateOptions& options = {});

struct TableOptions {
  DomainBox grid;
  int per_axis = 20;
  /// Continuation starts at the grid point nearest to this; defaults to
  /// the grid center.
  std::optional<Point> anchor;
  CandidateOptions solver;
  double involution_tol = 1e-6;
};

struct CandidateEntry {
  std::size_t index = 0;
  Point z;
  bool singular = false;
  bool consistent = false;
  int branch = -1;
  Point image;  // empty when the chosen branch has no value here
  double residual = 0.0;
  double involution_error = 0.0;
};

struct BranchSummary {
  int id = 0;
  std::size_t assigned = 0;
  std::size_t consistent = 0;
  std::size_t switches = 0;
  /// Largest |F(w) -+ J F(z)| over the branch, J the implicit Jacobian.
  double structural_residual = 0.0;
};

struct CandidatePointMap {
  Selection selection{std::vector<int>{0}};
  CheckKind kind = CheckKind::reversibility;
  std::vector<CandidateEntry> table;  // grid order
  std::vector<BranchSummary> branches;
  int chosen_branch = -1;
  bool trivial_only = false;
  std::size_t grid_points = 0;
  std::size_t singular_points = 0;
  std::size_t consistent_points = 0;
  std::size_t branch_switches = 0;
  std::size_t newton_failures = 0;
  Verdict verdict;

  /// Affine map fitted to the chosen branch with rationalized coefficients.
  std::optional<SmoothMap> fitted;
  double fit_residual = 0.0;
  std::optional<Verdict> fitted_check;
};

/// Pointwise Delta inversion over a grid with nearest-branch continuation,
/// involution consistency and an affine fit of the surviving branch.
CandidatePointMap candidate_map_table(const VectorField& f, const Selection& pi, CheckKind kind,
                                      const TableOptions& options);

/// Columns: index, z..., image..., branch, residual.
void write_candidate_csv(std::ostream& os, const CandidatePointMap& m, int dimension);

/// Best rational approximation with denominator <= max_den within tol.
std::optional<Rational> rationalize(double x, long max_den = 1000, double tol = 1e-7);

}  // namespace symflow
