#include "symflow/evaluate.hpp"

#include <algorithm>
#include <cstdlib>

namespace symflow {

namespace {

long double to_long_double(const Rational& q) {
  long double num = std::strtold(q.get_num().get_str().c_str(), nullptr);
  long double den = std::strtold(q.get_den().get_str().c_str(), nullptr);
  return num / den;
}

double eval_node(const Expr& e, std::span<const double> p, EvalTrace* trace) {
  double v = 0.0;
  switch (e.op()) {
    case Op::Const:
      v = e.value().get_d();
      break;
    case Op::Var: {
      auto i = static_cast<std::size_t>(e.variable_index());
      if (i > p.size()) {
        throw DimensionError("point has dimension " + std::to_string(p.size()) + " but expression uses variable " +
                             std::to_string(i));
      }
      v = p[i - 1];
      break;
    }
    case Op::Neg:
      v = -eval_node(e.arg(0), p, trace);
      break;
    case Op::Sin:
      v = std::sin(eval_node(e.arg(0), p, trace));
      break;
    case Op::Cos:
      v = std::cos(eval_node(e.arg(0), p, trace));
      break;
    case Op::Exp:
      v = std::exp(eval_node(e.arg(0), p, trace));
      break;
    case Op::Log: {
      double u = eval_node(e.arg(0), p, trace);
      if (!(u > 0)) throw EvaluationError("log of non-positive value in " + to_string(e), e);
      v = std::log(u);
      break;
    }
    case Op::Sqrt: {
      double u = eval_node(e.arg(0), p, trace);
      if (u < 0) throw EvaluationError("sqrt of negative value in " + to_string(e), e);
      v = std::sqrt(u);
      break;
    }
    case Op::Pos: {
      double u = eval_node(e.arg(0), p, trace);
      if (!(u > 0)) throw EvaluationError("positivity annotation violated in " + to_string(e), e);
      v = u;
      break;
    }
    case Op::Add:
      v = eval_node(e.arg(0), p, trace) + eval_node(e.arg(1), p, trace);
      break;
    case Op::Sub:
      v = eval_node(e.arg(0), p, trace) - eval_node(e.arg(1), p, trace);
      break;
    case Op::Mul:
      v = eval_node(e.arg(0), p, trace) * eval_node(e.arg(1), p, trace);
      break;
    case Op::Div: {
      double num = eval_node(e.arg(0), p, trace);
      double den = eval_node(e.arg(1), p, trace);
      if (den == 0.0) throw EvaluationError("division by zero in " + to_string(e), e);
      v = num / den;
      break;
    }
    case Op::Pow: {
      double b = eval_node(e.arg(0), p, trace);
      const Rational& r = e.exponent();
      if (is_integer(r)) {
        if (b == 0.0 && r < 0) throw EvaluationError("division by zero in " + to_string(e), e);
        v = detail::integer_pow(b, r.get_num().get_si());
      } else {
        if (b < 0 || (b == 0.0 && r < 0)) {
          throw EvaluationError("fractional power of non-positive base in " + to_string(e), e);
        }
        v = std::pow(b, r.get_d());
      }
      break;
    }
  }
  if (!std::isfinite(v)) throw EvaluationError("non-finite value in " + to_string(e), e);
  if (trace) trace->max_abs_subterm = std::max(trace->max_abs_subterm, std::abs(v));
  return v;
}

std::optional<Rational> exact_node(const Expr& e, std::span<const Rational> p) {
  switch (e.op()) {
    case Op::Const:
      return e.value();
    case Op::Var: {
      auto i = static_cast<std::size_t>(e.variable_index());
      if (i > p.size()) return std::nullopt;
      return p[i - 1];
    }
    case Op::Neg: {
      auto u = exact_node(e.arg(0), p);
      if (!u) return std::nullopt;
      return Rational(-*u);
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      auto a = exact_node(e.arg(0), p);
      auto b = exact_node(e.arg(1), p);
      if (!a || !b) return std::nullopt;
      switch (e.op()) {
        case Op::Add: return Rational(*a + *b);
        case Op::Sub: return Rational(*a - *b);
        case Op::Mul: return Rational(*a * *b);
        default:
          if (*b == 0) return std::nullopt;
          return Rational(*a / *b);
      }
    }
    case Op::Pow: {
      const Rational& r = e.exponent();
      if (!is_integer(r) || !r.get_num().fits_slong_p()) return std::nullopt;
      auto b = exact_node(e.arg(0), p);
      if (!b) return std::nullopt;
      long k = r.get_num().get_si();
      if (*b == 0 && k < 0) return std::nullopt;
      mpz_class num, den;
      unsigned long uk = static_cast<unsigned long>(k < 0 ? -k : k);
      mpz_pow_ui(num.get_mpz_t(), b->get_num().get_mpz_t(), uk);
      mpz_pow_ui(den.get_mpz_t(), b->get_den().get_mpz_t(), uk);
      Rational q = k < 0 ? Rational(den, num) : Rational(num, den);
      q.canonicalize();
      return q;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

double evaluate(const Expr& e, std::span<const double> point, EvalTrace* trace) {
  return eval_node(e, point, trace);
}

std::optional<Rational> evaluate_exact(const Expr& e, std::span<const Rational> point) {
  return exact_node(e, point);
}

CompiledExpr::CompiledExpr(const Expr& e) { emit(e, 1); }

void CompiledExpr::emit(const Expr& e, std::size_t depth) {
  max_depth_ = std::max(max_depth_, depth);
  Instr in{e.op()};
  switch (e.op()) {
    case Op::Const:
      in.value = e.value().get_d();
      in.lvalue = to_long_double(e.value());
      break;
    case Op::Var:
      in.var = e.variable_index() - 1;
      break;
    case Op::Pow:
      emit(e.arg(0), depth);
      in.value = e.exponent().get_d();
      in.lvalue = to_long_double(e.exponent());
      in.integer_exponent = is_integer(e.exponent()) && e.exponent().get_num().fits_slong_p();
      if (in.integer_exponent) in.int_exponent = e.exponent().get_num().get_si();
      break;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      emit(e.arg(0), depth);
      emit(e.arg(1), depth + 1);
      break;
    default:
      emit(e.arg(0), depth);
      break;
  }
  code_.push_back(in);
}

CompiledMap::CompiledMap(std::span<const Expr> components) {
  parts_.reserve(components.size());
  for (const auto& c : components) parts_.emplace_back(c);
}

}  // namespace symflow
