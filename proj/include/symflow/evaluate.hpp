#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "symflow/expr.hpp"

namespace symflow {

/// Largest |value| seen across all subterms during one or more evaluations.
struct EvalTrace {
  double max_abs_subterm = 0.0;
};

/// IEEE double evaluation. Throws EvaluationError carrying the offending
/// subtree on division by zero, log/sqrt/pos of a non-positive argument,
/// fractional power of a negative base, or a non-finite intermediate.
double evaluate(const Expr& e, std::span<const double> point, EvalTrace* trace = nullptr);

/// Exact evaluation for rational-only trees (constants, variables, + - * /
/// and integer powers); nullopt otherwise or on division by zero.
std::optional<Rational> evaluate_exact(const Expr& e, std::span<const Rational> point);

/// Flattened postfix program for repeated numeric evaluation in hot loops.
/// Domain violations produce NaN instead of throwing.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  explicit CompiledExpr(const Expr& e);

  template <class Real>
  Real operator()(std::span<const Real> point) const;

  template <class Real>
  Real operator()(const std::vector<Real>& point) const {
    return (*this)(std::span<const Real>(point));
  }

 private:
  struct Instr {
    Op op;
    int var = 0;           // Var: 0-based index
    double value = 0.0;    // Const value, Pow exponent
    long double lvalue = 0.0L;
    bool integer_exponent = false;
    long int_exponent = 0;
  };

  void emit(const Expr& e, std::size_t depth);

  std::vector<Instr> code_;
  std::size_t max_depth_ = 0;
};

/// n component programs evaluated together.
class CompiledMap {
 public:
  CompiledMap() = default;
  explicit CompiledMap(std::span<const Expr> components);

  std::size_t size() const noexcept { return parts_.size(); }

  template <class Real>
  void operator()(std::span<const Real> point, std::span<Real> out) const {
    for (std::size_t i = 0; i < parts_.size(); ++i) out[i] = parts_[i](point);
  }

  template <class Real>
  std::vector<Real> operator()(std::span<const Real> point) const {
    std::vector<Real> out(parts_.size());
    (*this)(point, std::span<Real>(out));
    return out;
  }

  const CompiledExpr& operator[](std::size_t i) const { return parts_[i]; }

 private:
  std::vector<CompiledExpr> parts_;
};

namespace detail {

template <class Real>
Real integer_pow(Real base, long e) {
  bool invert = e < 0;
  unsigned long n = static_cast<unsigned long>(invert ? -e : e);
  Real result = 1;
  while (n > 0) {
    if (n & 1UL) result *= base;
    n >>= 1;
    if (n > 0) base *= base;
  }
  return invert ? Real(1) / result : result;
}

}  // namespace detail

template <class Real>
Real CompiledExpr::operator()(std::span<const Real> point) const {
  constexpr Real nan = std::numeric_limits<Real>::quiet_NaN();
  std::array<Real, 64> small{};
  std::vector<Real> large;
  Real* stack = small.data();
  if (max_depth_ > small.size()) {
    large.resize(max_depth_);
    stack = large.data();
  }
  std::size_t top = 0;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Const:
        stack[top++] = std::is_same_v<Real, long double> ? Real(in.lvalue) : Real(in.value);
        break;
      case Op::Var:
        stack[top++] = point[static_cast<std::size_t>(in.var)];
        break;
      case Op::Neg:
        stack[top - 1] = -stack[top - 1];
        break;
      case Op::Sin:
        stack[top - 1] = std::sin(stack[top - 1]);
        break;
      case Op::Cos:
        stack[top - 1] = std::cos(stack[top - 1]);
        break;
      case Op::Exp:
        stack[top - 1] = std::exp(stack[top - 1]);
        break;
      case Op::Log:
        stack[top - 1] = stack[top - 1] > 0 ? std::log(stack[top - 1]) : nan;
        break;
      case Op::Sqrt:
        stack[top - 1] = stack[top - 1] >= 0 ? std::sqrt(stack[top - 1]) : nan;
        break;
      case Op::Pos:
        stack[top - 1] = stack[top - 1] > 0 ? stack[top - 1] : nan;
        break;
      case Op::Add:
        --top;
        stack[top - 1] += stack[top];
        break;
      case Op::Sub:
        --top;
        stack[top - 1] -= stack[top];
        break;
      case Op::Mul:
        --top;
        stack[top - 1] *= stack[top];
        break;
      case Op::Div:
        --top;
        stack[top - 1] = stack[top] != 0 ? stack[top - 1] / stack[top] : nan;
        break;
      case Op::Pow: {
        Real b = stack[top - 1];
        if (in.integer_exponent) {
          stack[top - 1] = (b == 0 && in.int_exponent < 0) ? nan : detail::integer_pow(b, in.int_exponent);
        } else if (b < 0 || (b == 0 && in.value < 0)) {
          stack[top - 1] = nan;
        } else {
          stack[top - 1] = std::pow(b, std::is_same_v<Real, long double> ? Real(in.lvalue) : Real(in.value));
        }
        break;
      }
    }
  }
  return stack[0];
}

}  // namespace symflow
