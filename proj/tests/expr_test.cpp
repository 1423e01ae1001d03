#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "random_expr.hpp"
#include "symflow/algebra.hpp"
#include "symflow/evaluate.hpp"
#include "symflow/parse.hpp"
#include "symflow/verdict.hpp"

namespace symflow {
namespace {

Expr P(const char* text, int n = 2) { return parse(text, n); }
Expr S(const char* text, int n = 2) { return simplify(parse(text, n)); }

TEST(Parse, SumOfVariableAndPower) {
  Expr e = P("y + x^2");
  ASSERT_EQ(e.op(), Op::Add);
  EXPECT_EQ(e.arg(0), Expr::variable(2));
  ASSERT_EQ(e.arg(1).op(), Op::Pow);
  EXPECT_EQ(e.arg(1).arg(0), Expr::variable(1));
  EXPECT_EQ(e.arg(1).exponent(), 2);
}

TEST(Parse, ProductHasThreeBinaryNodes) {
  Expr e = P("x*(1 - 2*y)");
  int binary = 0;
  std::function<void(const Expr&)> walk = [&](const Expr& n) {
    if (n.arity() == 2) ++binary;
    for (std::size_t i = 0; i < n.arity(); ++i) walk(n.arg(i));
  };
  walk(e);
  EXPECT_EQ(binary, 3);
  EXPECT_EQ(e.op(), Op::Mul);
}

TEST(Parse, TrailingOperatorReportsOffset) {
  try {
    parse("x +", 2);
    FAIL() << "expected a parse error";
  } catch (const ParseError& err) {
    EXPECT_EQ(err.offset(), 3u);
  }
}

TEST(Parse, UnknownIdentifierAndDimension) {
  EXPECT_THROW(parse("w + 1", 2), ParseError);
  EXPECT_THROW(parse("y", 1), DimensionError);
  EXPECT_THROW(parse("z3", 2), DimensionError);
  EXPECT_THROW(parse("x", 4), DimensionError);
  EXPECT_EQ(parse("z4 - z1", 4), Expr::variable(4) - Expr::variable(1));
  EXPECT_THROW(parse("x^y", 2), ParseError);
  EXPECT_THROW(parse("sin x", 2), ParseError);
}

TEST(Parse, LiteralsAreExactRationals) {
  EXPECT_EQ(P("0.25").value(), make_rational(1, 4));
  EXPECT_EQ(P("1e-3").value(), make_rational(1, 1000));
  EXPECT_EQ(P("2/3").value(), make_rational(2, 3));
  EXPECT_EQ(P("-2^2").value(), -4);  // ^ binds tighter than unary minus
  EXPECT_EQ(P("2^-1").value(), make_rational(1, 2));
  EXPECT_EQ(P("2^3^2").value(), 512);  // right associative
}

TEST(Parse, PrintParseRoundTripOnCanonicalForms) {
  for (const char* text : {"2*x^2 + 2*y", "-x^2*y + 3/4*x - 1", "x*y^(-1) + sin(x)^2", "(x + 1)^(-1)",
                           "-2/3*y + 5", "x^(1/2) - cos(y)", "2^(1/2)*x", "(x^2 + y)^(3/2)"}) {
    Expr c = S(text);
    std::string printed = to_string(c);
    EXPECT_EQ(to_string(parse(printed, 2)), printed) << text;
    EXPECT_EQ(simplify(parse(printed, 2)), c) << text;
  }
}

TEST(Differentiate, PowerRule) { EXPECT_EQ(differentiate(P("y + x^2"), 1), S("2*x")); }

TEST(Differentiate, WorkedTowerEntry) { EXPECT_EQ(differentiate(P("2*y + 2*x^2"), 2), S("2")); }

TEST(Differentiate, ChainRuleThroughProduct) {
  EXPECT_EQ(differentiate(P("sin(x)*y"), 1), S("cos(x)*y"));
  EXPECT_EQ(differentiate(P("exp(x*y)"), 2), S("x*exp(x*y)"));
  EXPECT_EQ(differentiate(P("sqrt(x)"), 1), S("1/2*x^(-1/2)"));
}

TEST(Differentiate, LogNeedsPositivityAnnotation) {
  EXPECT_THROW(differentiate(P("log(x)"), 1), DifferentiationError);
  EXPECT_EQ(differentiate(P("log(pos(x))"), 1), S("pos(x)^(-1)"));
  EXPECT_EQ(differentiate(P("log(exp(x) + 1)"), 1), simplify(P("exp(x)/(exp(x) + 1)")));
}

TEST(Evaluate, Basics) {
  EXPECT_DOUBLE_EQ(evaluate(P("2*x"), Point{3, 5}), 6.0);
  EXPECT_DOUBLE_EQ(evaluate(P("2*y + 2*x^2"), Point{1, 1}), 4.0);
}

TEST(Evaluate, DivisionByZeroCarriesSubtree) {
  Expr e = P("1 + 1/x");
  try {
    evaluate(e, Point{0, 1});
    FAIL() << "expected an evaluation error";
  } catch (const EvaluationError& err) {
    EXPECT_EQ(err.node(), P("1/x"));
  }
  EXPECT_THROW(evaluate(P("log(x - 2)"), Point{1, 0}), EvaluationError);
  EXPECT_THROW(evaluate(P("x^(1/2)"), Point{-1, 0}), EvaluationError);
}

TEST(Evaluate, ExactRationalPath) {
  std::vector<Rational> p{make_rational(1, 3), make_rational(2)};
  auto v = evaluate_exact(P("x^2*y - 1/x"), p);
  ASSERT_TRUE(v);
  EXPECT_EQ(*v, make_rational(2, 9) - 3);
  EXPECT_FALSE(evaluate_exact(P("sin(x)"), p));
}

TEST(Evaluate, CompiledMatchesTreeWalk) {
  Expr e = P("sin(x)*y^3 - 2/(1 + x^2) + (2 + y^2)^(1/2)");
  CompiledExpr c(e);
  for (double x : {-1.5, 0.0, 0.7}) {
    Point p{x, 0.3};
    EXPECT_NEAR(c(std::span<const double>(p)), evaluate(e, p), 1e-14);
    std::vector<long double> lp{x, 0.3L};
    EXPECT_NEAR(static_cast<double>(c(std::span<const long double>(lp))), evaluate(e, p), 1e-14);
  }
  EXPECT_TRUE(std::isnan(CompiledExpr(P("1/x"))(std::vector<double>{0.0, 1.0})));
}

TEST(Simplify, CollectsLikeTerms) {
  EXPECT_EQ(S("x + x"), S("2*x"));
  EXPECT_EQ(to_string(S("x + x")), "2*x");
  EXPECT_TRUE(S("(x + y)^2 - x^2 - 2*x*y - y^2").is_zero());
  EXPECT_TRUE(S("3*x*2*y - 2*y*3*x").is_zero());
}

TEST(Simplify, DeterministicGradedLexOrder) {
  EXPECT_EQ(to_string(S("y + x^2 + x*y + 1 + y^2 + x")), "x^2 + x*y + y^2 + x + y + 1");
  EXPECT_EQ(to_string(S("2*y + 2*x^2")), "2*x^2 + 2*y");
}

TEST(Simplify, LocalRewrites) {
  EXPECT_EQ(S("sin(-x)"), S("-sin(x)"));
  EXPECT_EQ(S("cos(-x + y)"), S("cos(x - y)"));
  EXPECT_TRUE(S("sin(0) + log(1) + exp(0) - cos(0)").is_zero());
  EXPECT_EQ(S("x/x"), S("1"));
  EXPECT_EQ(S("sqrt(x)^2"), S("x"));
  EXPECT_EQ(S("sqrt(4)"), S("2"));
  EXPECT_EQ(S("(2*x + 2)^(-1)"), S("1/2*(x + 1)^(-1)"));
  EXPECT_EQ(S("x*y/(x*y^2)"), S("y^(-1)"));
}

TEST(Compose, Examples) {
  std::vector<Expr> mirror{P("-x"), P("y")};
  EXPECT_EQ(compose(P("2*x"), mirror), S("-2*x"));
  std::vector<Expr> swap{P("2*y/3"), P("3*x/2")};
  EXPECT_EQ(compose(P("x*y"), swap), S("x*y"));
  std::vector<Expr> id{P("x"), P("y")};
  EXPECT_EQ(compose(P("x"), id), S("x"));
  EXPECT_THROW(compose(P("x*y"), std::vector<Expr>{P("x")}), DimensionError);
}

TEST(IdenticallyZero, OddPolynomial) {
  DomainBox box = DomainBox::cube(1, -1, 1);
  Verdict v = identically_zero(P("x^3 + (-x)^3", 1), box);
  EXPECT_EQ(v.status, Status::holds);
  EXPECT_EQ(v.certainty, Certainty::certain);
}

TEST(IdenticallyZero, NonOddPolynomialFailsWithWitness) {
  DomainBox box = DomainBox::cube(1, -1, 1);
  Verdict v = identically_zero(P("(x^3 + 1) + ((-x)^3 + 1)", 1), box);
  EXPECT_EQ(v.status, Status::fails);
  EXPECT_EQ(v.certainty, Certainty::certain);
  ASSERT_FALSE(v.witnesses.empty());
  EXPECT_NEAR(v.witnesses.front().residual, 2.0, 1e-12);
}

TEST(IdenticallyZero, TaylorRemainderWithinTolerance) {
  // |sin x - x + x^3/6| <= |x|^5/120 < 1e-7 on [-0.1, 0.1].
  DomainBox box = DomainBox::cube(1, -0.1, 0.1);
  ZeroTestOptions opt;
  opt.tolerance = 1e-6;
  Verdict v = identically_zero(P("sin(x) - x + x^3/6", 1), box, opt);
  EXPECT_EQ(v.status, Status::holds);
  EXPECT_EQ(v.certainty, Certainty::probabilistic);
  EXPECT_LT(v.residual_max, 1e-7);
  // With the default relative tolerance the remainder is visible.
  EXPECT_EQ(identically_zero(P("sin(x) - x + x^3/6", 1), DomainBox::cube(1, 0.5, 1)).status, Status::fails);
}

TEST(IdenticallyZero, AllSamplesFailingIsInconclusive) {
  DomainBox box = DomainBox::cube(1, -2, -1);
  Verdict v = identically_zero(P("log(x) - log(x)*1 + sin(log(x))", 1), box);
  EXPECT_EQ(v.status, Status::inconclusive);
  EXPECT_EQ(v.skipped, v.samples);
}

// Property suites.

TEST(Property, DerivativeMatchesCentralDifference) {
  std::mt19937_64 rng(7);
  const double h = 1e-6;
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Expr e = trial % 2 == 0 ? testing::random_polynomial(rng, 2, 4) : testing::random_smooth(rng, 2, 3);
    for (int var = 1; var <= 2; ++var) {
      Expr d = differentiate(e, var);
      Point p{std::uniform_real_distribution<double>(-1, 1)(rng), std::uniform_real_distribution<double>(-1, 1)(rng)};
      Point plus = p, minus = p;
      plus[var - 1] += h;
      minus[var - 1] -= h;
      double fd = (evaluate(e, plus) - evaluate(e, minus)) / (2 * h);
      double exact = evaluate(d, p);
      EXPECT_LE(std::abs(fd - exact), 1e-5 * (1 + std::abs(exact))) << to_string(e) << " d/dz" << var;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 400);
}

TEST(Property, SimplifyPreservesValueAndIsIdempotent) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Expr e = trial % 2 == 0 ? testing::random_polynomial(rng, 3, 4) : testing::random_smooth(rng, 3, 3);
    Expr s = simplify(e);
    EXPECT_EQ(simplify(s), s) << to_string(e);
    for (int k = 0; k < 3; ++k) {
      Point p{std::uniform_real_distribution<double>(-1, 1)(rng), std::uniform_real_distribution<double>(-1, 1)(rng),
              std::uniform_real_distribution<double>(-1, 1)(rng)};
      double a = evaluate(e, p);
      double b = evaluate(s, p);
      EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a)) * 100) << to_string(e);
    }
  }
}

TEST(Property, ComposeWithIdentityAndExpandedDifference) {
  std::mt19937_64 rng(13);
  std::vector<Expr> id{Expr::variable(1), Expr::variable(2)};
  DomainBox box = DomainBox::cube(2, -1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    Expr q = testing::random_polynomial(rng, 2, 4);
    EXPECT_EQ(compose(q, id), simplify(q));
    Verdict v = identically_zero(q - simplify(q), box);
    EXPECT_EQ(v.status, Status::holds);
    EXPECT_EQ(v.certainty, Certainty::certain);
  }
}

}  // namespace
}  // namespace symflow
