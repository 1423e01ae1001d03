#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace symflow {

/// Exact rational scalar used for every constant in an expression tree.
using Rational = mpq_class;

Rational make_rational(long num, long den = 1);
std::string to_string(const Rational& q);
bool is_integer(const Rational& q);

/// Node kinds. Unary: Neg..Pos. Binary: Add..Div. Pow carries a rational
/// exponent inline and has a single child (the base).
enum class Op : std::uint8_t {
  Const,
  Var,
  Neg,
  Sin,
  Cos,
  Exp,
  Log,
  Sqrt,
  Pos,  // positivity annotation: value of the argument, asserted > 0
  Add,
  Sub,
  Mul,
  Div,
  Pow,
};

const char* op_name(Op op);
bool is_function(Op op);

/// Immutable expression tree over variables z_1..z_n. Copies share nodes.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(const Rational& value);
  static Expr constant(long value);
  /// 1-based variable index.
  static Expr variable(int index);
  static Expr unary(Op op, Expr arg);
  static Expr binary(Op op, Expr lhs, Expr rhs);
  static Expr power(Expr base, const Rational& exponent);

  Op op() const noexcept;
  bool is_constant() const noexcept { return op() == Op::Const; }
  bool is_zero() const;
  bool is_one() const;

  const Rational& value() const;     // Const
  const Rational& exponent() const;  // Pow
  int variable_index() const;        // Var

  std::size_t arity() const noexcept;
  const Expr& arg(std::size_t i) const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  struct Node;
  static std::shared_ptr<const Node> zero_node();
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  Op op = Op::Const;
  int var = 0;
  Rational value;  // constant value, or exponent for Pow
  std::vector<Expr> args;
};

/// Total structural order: negative, zero or positive.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

// Raw builders; no simplification is performed.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);
Expr pos(const Expr& a);
Expr pow(const Expr& base, const Rational& exponent);
Expr pow(const Expr& base, long exponent);

std::size_t node_count(const Expr& e);
/// Largest variable index used, 0 for constants.
int max_variable_index(const Expr& e);
/// True when the tree contains only constants, variables, + - * / and
/// integer powers.
bool is_rational_function(const Expr& e);

/// Variable naming: x,y,z when dimension <= 3, z1..zn otherwise.
std::string variable_name(int index, int dimension);

/// Deterministic infix printer with minimal parentheses. The dimension
/// selects the variable naming scheme; 0 picks it from the tree.
std::string to_string(const Expr& e, int dimension = 0);
std::ostream& operator<<(std::ostream& os, const Expr& e);

/// Malformed text, with the 0-based character offset of the problem.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Differentiation of a node combination the library refuses to handle.
class DifferentiationError : public std::runtime_error {
 public:
  DifferentiationError(const std::string& what, Expr node)
      : std::runtime_error(what), node_(std::move(node)) {}
  const Expr& node() const noexcept { return node_; }

 private:
  Expr node_;
};

/// Domain violation during numeric evaluation; carries the offending subtree.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, Expr node)
      : std::runtime_error(what), node_(std::move(node)) {}
  const Expr& node() const noexcept { return node_; }

 private:
  Expr node_;
};

}  // namespace symflow
