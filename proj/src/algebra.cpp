#include "symflow/algebra.hpp"

#include <map>
#include <optional>
#include <utility>

namespace symflow {

namespace {

// A monomial is a product of atoms raised to nonzero rational exponents.
// Regular atoms are variables and function calls; every other atom is a
// "composite base" (a canonical polynomial raised to a fractional or
// negative power).
struct Factor {
  Expr atom;
  Rational exp;
};
using Monomial = std::vector<Factor>;

bool is_regular_atom(const Expr& a) { return a.op() == Op::Var || is_function(a.op()); }

int compare_atoms(const Expr& a, const Expr& b) {
  bool va = a.op() == Op::Var;
  bool vb = b.op() == Op::Var;
  if (va && vb) {
    return a.variable_index() < b.variable_index() ? -1 : (a.variable_index() > b.variable_index() ? 1 : 0);
  }
  if (va) return -1;
  if (vb) return 1;
  return compare(a, b);
}

int sign_of(const Rational& q) { return sgn(q); }

Rational degree(const Monomial& m) {
  Rational d = 0;
  for (const auto& f : m) d += f.exp;
  return d;
}

// Graded lexicographic comparison; atoms earlier in atom order are more
// significant.
int compare_monomials(const Monomial& a, const Monomial& b) {
  int c = cmp(degree(a), degree(b));
  if (c != 0) return c < 0 ? -1 : 1;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int order;
    if (i == a.size()) {
      order = 1;
    } else if (j == b.size()) {
      order = -1;
    } else {
      order = compare_atoms(a[i].atom, b[j].atom);
    }
    if (order < 0) {
      return sign_of(a[i].exp);  // atom absent from b
    }
    if (order > 0) {
      return -sign_of(b[j].exp);
    }
    int e = cmp(a[i].exp, b[j].exp);
    if (e != 0) return e < 0 ? -1 : 1;
    ++i;
    ++j;
  }
  return 0;
}

struct MonomialGreater {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare_monomials(a, b) > 0; }
};

// Iteration order is descending, i.e. the printing order.
using Poly = std::map<Monomial, Rational, MonomialGreater>;

void add_term(Poly& p, const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = p.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

void add_into(Poly& acc, const Poly& p, const Rational& scale = 1) {
  for (const auto& [m, c] : p) add_term(acc, m, Rational(c * scale));
}

Poly constant_poly(const Rational& c) {
  Poly p;
  add_term(p, {}, c);
  return p;
}

bool is_constant_poly(const Poly& p) { return p.empty() || (p.size() == 1 && p.begin()->first.empty()); }

Rational constant_value(const Poly& p) { return p.empty() ? Rational(0) : p.begin()->second; }

Monomial multiply_monomials(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int order = i == a.size() ? 1 : (j == b.size() ? -1 : compare_atoms(a[i].atom, b[j].atom));
    if (order < 0) {
      out.push_back(a[i++]);
    } else if (order > 0) {
      out.push_back(b[j++]);
    } else {
      Rational e = a[i].exp + b[j].exp;
      if (e != 0) out.push_back({a[i].atom, e});
      ++i;
      ++j;
    }
  }
  return out;
}

Poly to_poly(const Expr& e);
Expr to_expr(const Poly& p);
Poly multiply(const Poly& a, const Poly& b);
Poly power(const Poly& p, const Rational& r);

std::optional<Rational> exact_root(const Rational& c, const mpz_class& t) {
  if (c < 0 || !t.fits_ulong_p()) return std::nullopt;
  unsigned long n = t.get_ui();
  mpz_class num, den;
  if (mpz_root(num.get_mpz_t(), c.get_num().get_mpz_t(), n) == 0) return std::nullopt;
  if (mpz_root(den.get_mpz_t(), c.get_den().get_mpz_t(), n) == 0) return std::nullopt;
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational integer_power(const Rational& base, long e) {
  mpz_class num, den;
  unsigned long ue = static_cast<unsigned long>(e < 0 ? -e : e);
  mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), ue);
  mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), ue);
  Rational q = e < 0 ? Rational(den, num) : Rational(num, den);
  q.canonicalize();
  return q;
}

long to_long(const Rational& q) {
  if (!is_integer(q) || !q.get_num().fits_slong_p()) throw std::overflow_error("exponent out of range");
  return q.get_num().get_si();
}

// Brings a single term into normal form: composite bases with integer
// exponent >= 1 are expanded, composite bases with a negative integer
// exponent are made monic, and single-term bases are folded back into the
// monomial.
Poly normalize_term(Rational coeff, Monomial m) {
  for (std::size_t k = 0; k < m.size(); ++k) {
    const Factor f = m[k];
    if (is_regular_atom(f.atom)) continue;
    Poly base = to_poly(f.atom);
    Monomial rest = m;
    rest.erase(rest.begin() + static_cast<long>(k));
    if (is_integer(f.exp)) {
      if (f.exp > 0 || base.size() == 1) {
        return multiply(normalize_term(coeff, rest), power(base, f.exp));
      }
      if (base.empty()) continue;  // 0^(-k) stays symbolic
      Rational lead = base.begin()->second;
      if (lead == 1) continue;
      Poly monic;
      add_into(monic, base, Rational(1 / lead));
      Monomial atom{{to_expr(monic), f.exp}};
      Rational c = coeff * integer_power(lead, to_long(f.exp));
      return normalize_term(c, multiply_monomials(rest, atom));
    }
    if (f.exp > 1) {
      mpz_class whole = f.exp.get_num() / f.exp.get_den();  // floor for positive values
      Rational frac = f.exp - Rational(whole);
      Monomial reduced = rest;
      reduced = multiply_monomials(reduced, Monomial{{f.atom, frac}});
      return multiply(normalize_term(coeff, reduced), power(base, Rational(whole)));
    }
  }
  Poly out;
  add_term(out, m, coeff);
  return out;
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      Monomial m = multiply_monomials(ma, mb);
      bool composite = false;
      for (const auto& f : m) composite |= !is_regular_atom(f.atom);
      if (!composite) {
        add_term(out, m, Rational(ca * cb));
      } else {
        add_into(out, normalize_term(Rational(ca * cb), std::move(m)));
      }
    }
  }
  return out;
}

Poly atom_poly(const Expr& atom, const Rational& exp) {
  return normalize_term(Rational(1), Monomial{{atom, exp}});
}

Poly power(const Poly& p, const Rational& r) {
  if (r == 0) return constant_poly(1);
  if (r == 1) return p;
  if (p.empty()) {
    if (r > 0) return {};
    Poly out;
    add_term(out, Monomial{{Expr::constant(0), r}}, 1);
    return out;
  }
  if (is_integer(r)) {
    long e = to_long(r);
    if (p.size() == 1) {
      const auto& [m, c] = *p.begin();
      Monomial pm;
      for (const auto& f : m) pm.push_back({f.atom, Rational(f.exp * r)});
      return normalize_term(integer_power(c, e), std::move(pm));
    }
    if (e > 0) {
      Poly result = constant_poly(1);
      Poly base = p;
      while (e > 0) {
        if (e & 1) result = multiply(result, base);
        e >>= 1;
        if (e > 0) base = multiply(base, base);
      }
      return result;
    }
    return atom_poly(to_expr(p), r);  // normalize_term makes the base monic
  }
  // Fractional exponent.
  if (is_constant_poly(p)) {
    Rational c = constant_value(p);
    if (auto root = exact_root(c, r.get_den())) {
      return constant_poly(integer_power(*root, to_long(Rational(r.get_num()))));
    }
    return atom_poly(Expr::constant(c), r);
  }
  if (p.size() == 1) {
    const auto& [m, c] = *p.begin();
    if (c == 1 && m.size() == 1 && is_regular_atom(m[0].atom) && (m[0].exp == 1 || !is_integer(m[0].exp))) {
      return atom_poly(m[0].atom, Rational(m[0].exp * r));
    }
  }
  return atom_poly(to_expr(p), r);
}

Poly negate(const Poly& p) {
  Poly out;
  add_into(out, p, Rational(-1));
  return out;
}

Rational leading_coefficient(const Poly& p) { return p.empty() ? Rational(0) : p.begin()->second; }

Poly function_poly(Op op, const Expr& arg) {
  Poly u = to_poly(arg);
  switch (op) {
    case Op::Sin:
      if (u.empty()) return {};
      if (leading_coefficient(u) < 0) return negate(atom_poly(Expr::unary(Op::Sin, to_expr(negate(u))), 1));
      return atom_poly(Expr::unary(Op::Sin, to_expr(u)), 1);
    case Op::Cos:
      if (u.empty()) return constant_poly(1);
      if (leading_coefficient(u) < 0) u = negate(u);
      return atom_poly(Expr::unary(Op::Cos, to_expr(u)), 1);
    case Op::Exp:
      if (u.empty()) return constant_poly(1);
      return atom_poly(Expr::unary(Op::Exp, to_expr(u)), 1);
    case Op::Log:
      if (is_constant_poly(u) && constant_value(u) == 1) return {};
      return atom_poly(Expr::unary(Op::Log, to_expr(u)), 1);
    case Op::Pos:
      if (is_constant_poly(u) && constant_value(u) > 0) return u;
      return atom_poly(Expr::unary(Op::Pos, to_expr(u)), 1);
    case Op::Sqrt:
      return power(u, make_rational(1, 2));
    default:
      throw std::logic_error("function_poly: not a function");
  }
}

Poly to_poly(const Expr& e) {
  switch (e.op()) {
    case Op::Const:
      return constant_poly(e.value());
    case Op::Var: {
      Poly p;
      add_term(p, Monomial{{e, 1}}, 1);
      return p;
    }
    case Op::Neg:
      return negate(to_poly(e.arg(0)));
    case Op::Add: {
      Poly p = to_poly(e.arg(0));
      add_into(p, to_poly(e.arg(1)));
      return p;
    }
    case Op::Sub: {
      Poly p = to_poly(e.arg(0));
      add_into(p, to_poly(e.arg(1)), Rational(-1));
      return p;
    }
    case Op::Mul:
      return multiply(to_poly(e.arg(0)), to_poly(e.arg(1)));
    case Op::Div:
      return multiply(to_poly(e.arg(0)), power(to_poly(e.arg(1)), Rational(-1)));
    case Op::Pow:
      return power(to_poly(e.arg(0)), e.exponent());
    default:
      return function_poly(e.op(), e.arg(0));
  }
}

Expr factor_expr(const Factor& f) {
  if (is_regular_atom(f.atom) && f.exp == 1) return f.atom;
  return pow(f.atom, f.exp);
}

Expr term_expr(const Monomial& m, const Rational& c) {
  if (m.empty()) return Expr::constant(c);
  std::vector<Expr> factors;
  factors.reserve(m.size());
  for (const auto& f : m) factors.push_back(factor_expr(f));
  Expr product;
  std::size_t start = 0;
  if (c == 1) {
    product = factors[0];
    start = 1;
  } else if (c == -1) {
    product = -factors[0];
    start = 1;
  } else {
    product = Expr::constant(c);
  }
  for (std::size_t i = start; i < factors.size(); ++i) product = product * factors[i];
  return product;
}

// Rebuilds the tree in the shape the parser produces for its printed form.
Expr to_expr(const Poly& p) {
  if (p.empty()) return Expr::constant(0);
  Expr out;
  bool first = true;
  for (const auto& [m, c] : p) {
    if (first) {
      out = term_expr(m, c);
      first = false;
    } else if (c < 0) {
      out = out - term_expr(m, Rational(-c));
    } else {
      out = out + term_expr(m, c);
    }
  }
  return out;
}

Expr differentiate_raw(const Expr& e, int var) {
  switch (e.op()) {
    case Op::Const:
      return Expr::constant(0);
    case Op::Var:
      return Expr::constant(e.variable_index() == var ? 1 : 0);
    case Op::Neg:
      return -differentiate_raw(e.arg(0), var);
    case Op::Add:
      return differentiate_raw(e.arg(0), var) + differentiate_raw(e.arg(1), var);
    case Op::Sub:
      return differentiate_raw(e.arg(0), var) - differentiate_raw(e.arg(1), var);
    case Op::Mul: {
      const Expr& u = e.arg(0);
      const Expr& v = e.arg(1);
      return differentiate_raw(u, var) * v + u * differentiate_raw(v, var);
    }
    case Op::Div: {
      const Expr& u = e.arg(0);
      const Expr& v = e.arg(1);
      return (differentiate_raw(u, var) * v - u * differentiate_raw(v, var)) / pow(v, 2);
    }
    case Op::Pow: {
      const Rational& r = e.exponent();
      if (r == 0) return Expr::constant(0);
      return Expr::constant(r) * pow(e.arg(0), Rational(r - 1)) * differentiate_raw(e.arg(0), var);
    }
    case Op::Sin:
      return cos(e.arg(0)) * differentiate_raw(e.arg(0), var);
    case Op::Cos:
      return -(sin(e.arg(0)) * differentiate_raw(e.arg(0), var));
    case Op::Exp:
      return e * differentiate_raw(e.arg(0), var);
    case Op::Log:
      if (!is_known_positive(e.arg(0))) {
        throw DifferentiationError("cannot differentiate " + to_string(e) +
                                       ": logarithm argument is not annotated positive (wrap it in pos(...))",
                                   e);
      }
      return differentiate_raw(e.arg(0), var) / e.arg(0);
    case Op::Sqrt:
      return Expr::constant(make_rational(1, 2)) * pow(e.arg(0), make_rational(-1, 2)) *
             differentiate_raw(e.arg(0), var);
    case Op::Pos:
      return differentiate_raw(e.arg(0), var);
  }
  throw std::logic_error("differentiate: unknown op");
}

}  // namespace

Expr simplify(const Expr& e) { return to_expr(to_poly(e)); }

bool is_polynomial(const Expr& e) {
  for (const auto& [m, c] : to_poly(e)) {
    for (const auto& f : m) {
      if (f.atom.op() != Op::Var || !is_integer(f.exp) || f.exp < 0) return false;
    }
  }
  return true;
}

Expr differentiate(const Expr& e, int var) {
  if (var < 1) throw DimensionError("variable index must be >= 1");
  return simplify(differentiate_raw(e, var));
}

Expr substitute(const Expr& e, std::span<const Expr> replacements) {
  switch (e.op()) {
    case Op::Const:
      return e;
    case Op::Var: {
      auto i = static_cast<std::size_t>(e.variable_index());
      if (i > replacements.size()) {
        throw DimensionError("substitution has " + std::to_string(replacements.size()) +
                             " entries but expression uses variable " + std::to_string(i));
      }
      return replacements[i - 1];
    }
    case Op::Pow:
      return pow(substitute(e.arg(0), replacements), e.exponent());
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      return Expr::binary(e.op(), substitute(e.arg(0), replacements), substitute(e.arg(1), replacements));
    default:
      return Expr::unary(e.op(), substitute(e.arg(0), replacements));
  }
}

Expr compose(const Expr& e, std::span<const Expr> replacements) {
  return simplify(substitute(e, replacements));
}

bool is_known_positive(const Expr& e) {
  switch (e.op()) {
    case Op::Const:
      return e.value() > 0;
    case Op::Exp:
    case Op::Pos:
      return true;
    case Op::Sqrt:
    case Op::Pow:
      return is_known_positive(e.arg(0));
    case Op::Add:
    case Op::Mul:
    case Op::Div:
      return is_known_positive(e.arg(0)) && is_known_positive(e.arg(1));
    default:
      return false;
  }
}

}  // namespace symflow
