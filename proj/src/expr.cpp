#include "symflow/expr.hpp"

#include <algorithm>
#include <sstream>

namespace symflow {

Rational make_rational(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

bool is_integer(const Rational& q) { return q.get_den() == 1; }

const char* op_name(Op op) {
  switch (op) {
    case Op::Const: return "const";
    case Op::Var: return "var";
    case Op::Neg: return "neg";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Pos: return "pos";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Pow: return "pow";
  }
  return "?";
}

bool is_function(Op op) {
  switch (op) {
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Log:
    case Op::Sqrt:
    case Op::Pos:
      return true;
    default:
      return false;
  }
}

std::shared_ptr<const Expr::Node> Expr::zero_node() {
  static const auto node = [] {
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::Const;
    n->value = 0;
    return std::shared_ptr<const Expr::Node>(std::move(n));
  }();
  return node;
}

Expr::Expr() : node_(zero_node()) {}

Expr Expr::constant(const Rational& value) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = value;
  n->value.canonicalize();
  return Expr(std::move(n));
}

Expr Expr::constant(long value) { return constant(Rational(value)); }

Expr Expr::variable(int index) {
  if (index < 1) throw DimensionError("variable index must be >= 1");
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->var = index;
  return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr arg) {
  if (!(op == Op::Neg || is_function(op))) throw std::invalid_argument("not a unary op");
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args.push_back(std::move(arg));
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  if (!(op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div)) {
    throw std::invalid_argument("not a binary op");
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args.reserve(2);
  n->args.push_back(std::move(lhs));
  n->args.push_back(std::move(rhs));
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, const Rational& exponent) {
  auto n = std::make_shared<Node>();
  n->op = Op::Pow;
  n->value = exponent;
  n->value.canonicalize();
  n->args.push_back(std::move(base));
  return Expr(std::move(n));
}

Op Expr::op() const noexcept { return node_->op; }

bool Expr::is_zero() const { return op() == Op::Const && node_->value == 0; }
bool Expr::is_one() const { return op() == Op::Const && node_->value == 1; }

const Rational& Expr::value() const {
  if (op() != Op::Const) throw std::logic_error("value() on non-constant");
  return node_->value;
}

const Rational& Expr::exponent() const {
  if (op() != Op::Pow) throw std::logic_error("exponent() on non-power");
  return node_->value;
}

int Expr::variable_index() const {
  if (op() != Op::Var) throw std::logic_error("variable_index() on non-variable");
  return node_->var;
}

std::size_t Expr::arity() const noexcept { return node_->args.size(); }

const Expr& Expr::arg(std::size_t i) const { return node_->args.at(i); }

bool operator==(const Expr& a, const Expr& b) {
  return a.node_ == b.node_ || compare(a, b) == 0;
}

int compare(const Expr& a, const Expr& b) {
  if (a.op() != b.op()) return static_cast<int>(a.op()) < static_cast<int>(b.op()) ? -1 : 1;
  switch (a.op()) {
    case Op::Const:
      return cmp(a.value(), b.value()) < 0 ? -1 : (cmp(a.value(), b.value()) > 0 ? 1 : 0);
    case Op::Var:
      return a.variable_index() < b.variable_index() ? -1
             : a.variable_index() > b.variable_index() ? 1
                                                       : 0;
    case Op::Pow: {
      int c = cmp(a.exponent(), b.exponent());
      if (c != 0) return c < 0 ? -1 : 1;
      break;
    }
    default:
      break;
  }
  for (std::size_t i = 0; i < a.arity(); ++i) {
    int c = compare(a.arg(i), b.arg(i));
    if (c != 0) return c;
  }
  return 0;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Op::Neg, a); }
Expr sin(const Expr& a) { return Expr::unary(Op::Sin, a); }
Expr cos(const Expr& a) { return Expr::unary(Op::Cos, a); }
Expr exp(const Expr& a) { return Expr::unary(Op::Exp, a); }
Expr log(const Expr& a) { return Expr::unary(Op::Log, a); }
Expr sqrt(const Expr& a) { return Expr::unary(Op::Sqrt, a); }
Expr pos(const Expr& a) { return Expr::unary(Op::Pos, a); }
Expr pow(const Expr& base, const Rational& exponent) { return Expr::power(base, exponent); }
Expr pow(const Expr& base, long exponent) { return Expr::power(base, Rational(exponent)); }

std::size_t node_count(const Expr& e) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < e.arity(); ++i) total += node_count(e.arg(i));
  return total;
}

int max_variable_index(const Expr& e) {
  if (e.op() == Op::Var) return e.variable_index();
  int m = 0;
  for (std::size_t i = 0; i < e.arity(); ++i) m = std::max(m, max_variable_index(e.arg(i)));
  return m;
}

bool is_rational_function(const Expr& e) {
  switch (e.op()) {
    case Op::Const:
    case Op::Var:
      return true;
    case Op::Neg:
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      break;
    case Op::Pow:
      if (!is_integer(e.exponent())) return false;
      break;
    default:
      return false;
  }
  for (std::size_t i = 0; i < e.arity(); ++i) {
    if (!is_rational_function(e.arg(i))) return false;
  }
  return true;
}

std::string variable_name(int index, int dimension) {
  if (dimension <= 3 && index <= 3) {
    static const char* names[] = {"x", "y", "z"};
    return names[index - 1];
  }
  return "z" + std::to_string(index);
}

namespace {

// Binding strength used by the printer; mirrors the parser's precedence.
constexpr int kPrecSum = 1;
constexpr int kPrecProduct = 2;
constexpr int kPrecUnary = 3;
constexpr int kPrecPower = 4;
constexpr int kPrecAtom = 5;

int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Const:
      if (!is_integer(e.value())) return kPrecProduct;
      return e.value() < 0 ? kPrecUnary : kPrecAtom;
    case Op::Var:
      return kPrecAtom;
    case Op::Neg:
      return kPrecUnary;
    case Op::Add:
    case Op::Sub:
      return kPrecSum;
    case Op::Mul:
    case Op::Div:
      return kPrecProduct;
    case Op::Pow:
      return kPrecPower;
    default:
      return kPrecAtom;  // function call syntax
  }
}

class Printer {
 public:
  explicit Printer(int dimension) : dimension_(dimension) {}

  void print(const Expr& e, int min_prec) {
    bool parens = precedence(e) < min_prec;
    if (parens) out_ << '(';
    print_bare(e);
    if (parens) out_ << ')';
  }

  std::string str() const { return out_.str(); }

 private:
  void print_bare(const Expr& e) {
    switch (e.op()) {
      case Op::Const:
        out_ << to_string(e.value());
        return;
      case Op::Var:
        out_ << variable_name(e.variable_index(), dimension_);
        return;
      case Op::Neg:
        out_ << '-';
        print(e.arg(0), kPrecUnary);
        return;
      case Op::Add:
      case Op::Sub:
        print(e.arg(0), kPrecSum);
        out_ << (e.op() == Op::Add ? " + " : " - ");
        print(e.arg(1), kPrecProduct);
        return;
      case Op::Mul:
      case Op::Div:
        print(e.arg(0), kPrecProduct);
        out_ << (e.op() == Op::Mul ? '*' : '/');
        print(e.arg(1), kPrecUnary);
        return;
      case Op::Pow: {
        print(e.arg(0), kPrecAtom);
        const Rational& r = e.exponent();
        if (is_integer(r) && r >= 0) {
          out_ << '^' << to_string(r);
        } else {
          out_ << "^(" << to_string(r) << ')';
        }
        return;
      }
      default:
        out_ << op_name(e.op()) << '(';
        print(e.arg(0), 0);
        out_ << ')';
        return;
    }
  }

  int dimension_;
  std::ostringstream out_;
};

}  // namespace

std::string to_string(const Expr& e, int dimension) {
  if (dimension <= 0) dimension = std::max(1, max_variable_index(e));
  Printer p(dimension);
  p.print(e, 0);
  return p.str();
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

}  // namespace symflow
