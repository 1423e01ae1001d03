#pragma once

#include <string_view>

#include "symflow/expr.hpp"

namespace symflow {

/// Parses infix text over `dimension` variables.
///
/// Grammar (precedence high to low): `^` (right associative, exponent must
/// fold to a rational constant), unary `-`/`+`, `*` `/`, `+` `-`. Function
/// calls: sin cos exp log sqrt pos. Variables: x, y, z when dimension <= 3,
/// and z1..zn for any dimension. Literals: integers, decimals and
/// scientific notation, all read as exact rationals. Subtrees made only of
/// literals are folded into a single constant.
///
/// Throws ParseError (with offset) on malformed input or unknown names and
/// DimensionError when a variable exceeds the dimension.
Expr parse(std::string_view text, int dimension);

/// Parses a rational literal such as "3", "-2/3", "0.25" or "1e-3".
Rational parse_rational(std::string_view text);

}  // namespace symflow
