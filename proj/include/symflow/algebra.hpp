#pragma once

#include <span>
#include <vector>

#include "symflow/expr.hpp"

namespace symflow {

/// Canonical simplification.
///
/// Polynomial structure is expanded and collected by monomial in graded
/// lexicographic order (x > y > z, higher total degree first), so two
/// polynomials are equal iff their simplified trees are equal. Non-polynomial
/// subterms (function calls, fractional powers, inverses of multi-term
/// polynomials) are simplified recursively and then treated as opaque atoms
/// of the same polynomial algebra. Local rewrites: constant folding, 0/1
/// identities, sin(-u) = -sin(u), cos(-u) = cos(u), exp(0) = 1, log(1) = 0.
/// Idempotent.
Expr simplify(const Expr& e);

/// True when the simplified form is a polynomial in the variables with
/// rational coefficients (no atoms other than variables, no negative or
/// fractional exponents).
bool is_polynomial(const Expr& e);

/// Exact partial derivative with respect to variable `var` (1-based),
/// simplified. Throws DifferentiationError for log of an argument that is
/// not known to be positive.
Expr differentiate(const Expr& e, int var);

/// Replaces variable i by replacements[i-1]; no simplification.
Expr substitute(const Expr& e, std::span<const Expr> replacements);

/// substitute followed by simplify. Throws DimensionError when `e` uses a
/// variable with no replacement.
Expr compose(const Expr& e, std::span<const Expr> replacements);

/// Conservative sign analysis: positive constants, exp(.), pos(.), and
/// sums, products, quotients and powers of such.
bool is_known_positive(const Expr& e);

}  // namespace symflow
