#include <gtest/gtest.h>

#include <cmath>

#include "symflow/checks.hpp"
#include "symflow/classify.hpp"
#include "symflow/flow.hpp"
#include "symflow/parse.hpp"

namespace symflow {
namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }
Expr X(const char* t) { return parse(t, 2); }

std::string show(const SmoothMap& m) { return to_string(m[0], 2) + ", " + to_string(m[1], 2); }

const Condition* find(const Classification& c, const std::string& name) {
  for (const auto& k : c.conditions) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

TEST(LotkaVolterra, Reversible) {
  FamilyClassification r = classify_lotka_volterra(q(1), q(2), q(3), q(1));
  ASSERT_EQ(r.reversibility.verdict, Existence::exists);
  ASSERT_TRUE(r.reversibility.sigma);
  EXPECT_EQ(show(*r.reversibility.sigma), "2/3*y, 3/2*x");
  for (const auto& [name, v] : r.reversibility.verification) {
    EXPECT_TRUE(v.holds()) << name;
    EXPECT_EQ(v.certainty, Certainty::certain) << name;
  }
  EXPECT_EQ(r.symmetry.verdict, Existence::not_exists);
  EXPECT_FALSE(r.symmetry.sigma);
  EXPECT_EQ(r.overall(), Existence::exists);
}

TEST(LotkaVolterra, ReversibleFlowRelation) {
  FamilyClassification r = classify_lotka_volterra(q(1), q(2), q(3), q(1), DomainBox::cube(2, 0, 5));
  FlowCheckOptions opt;
  opt.region = DomainBox::cube(2, 0.2, 2);
  opt.integrator.horizon = 0.5;
  Verdict v = check_flow_relation(r.field, *r.reversibility.sigma, CheckKind::reversibility, opt);
  EXPECT_TRUE(v.holds());
  EXPECT_LT(v.residual_max, 1e-5);
}

TEST(LotkaVolterra, UnequalRatesRefuted) {
  FamilyClassification r = classify_lotka_volterra(q(1), q(2), q(3), q(2));
  EXPECT_EQ(r.reversibility.verdict, Existence::not_exists);
  EXPECT_FALSE(r.reversibility.witnesses.empty());
  const Condition* c = find(r.reversibility, "a = d");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->satisfied);
  EXPECT_EQ(c->certainty, Certainty::certain);
  EXPECT_EQ(r.overall(), Existence::not_exists);
}

TEST(LotkaVolterra, Symmetric) {
  FamilyClassification r = classify_lotka_volterra(q(1), q(1), q(1), q(-1));
  ASSERT_EQ(r.symmetry.verdict, Existence::exists);
  EXPECT_EQ(show(*r.symmetry.sigma), "-y, -x");
  for (const auto& [name, v] : r.symmetry.verification) {
    EXPECT_TRUE(v.holds()) << name;
    EXPECT_EQ(v.certainty, Certainty::certain) << name;
  }
  EXPECT_EQ(r.reversibility.verdict, Existence::not_exists);
}

TEST(LotkaVolterra, SymmetryNeedsOppositeRates) {
  FamilyClassification r = classify_lotka_volterra(q(1), q(1), q(1), q(1));
  EXPECT_EQ(r.symmetry.verdict, Existence::not_exists);
  ASSERT_EQ(r.reversibility.verdict, Existence::exists);
  EXPECT_EQ(show(*r.reversibility.sigma), "y, x");
}

TEST(LotkaVolterra, Triangular) {
  FamilyClassification r = classify_lotka_volterra(q(1), q(0), q(1), q(1));
  EXPECT_EQ(r.reversibility.verdict, Existence::hypotheses_violated);
  EXPECT_EQ(r.symmetry.verdict, Existence::hypotheses_violated);
  EXPECT_EQ(r.overall(), Existence::hypotheses_violated);
  EXPECT_FALSE(find(r.reversibility, "bc != 0")->satisfied);
}

TEST(LotkaVolterra, RationalCoefficients) {
  FamilyClassification r = classify_lotka_volterra(q(1, 2), q(-3, 4), q(5, 7), q(1, 2));
  ASSERT_EQ(r.reversibility.verdict, Existence::exists);
  EXPECT_EQ(show(*r.reversibility.sigma), "-21/20*y, -20/21*x");
}

TEST(Lienard, OddDamping) {
  FamilyClassification r = classify_lienard(X("x^3"), X("x"), {-1, 1});
  ASSERT_EQ(r.reversibility.verdict, Existence::exists);
  EXPECT_EQ(show(*r.reversibility.sigma), "-x, y");
  for (const auto& [name, v] : r.reversibility.verification) {
    EXPECT_TRUE(v.holds()) << name;
    EXPECT_EQ(v.certainty, Certainty::certain) << name;
  }
  const Condition* fp = find(r.reversibility, "f'(x) > 0");
  ASSERT_NE(fp, nullptr);
  EXPECT_TRUE(fp->satisfied);
  EXPECT_EQ(fp->certainty, Certainty::certain);
  const Condition* alpha = find(r.reversibility, "alpha(x) = -x");
  ASSERT_NE(alpha, nullptr);
  EXPECT_TRUE(alpha->satisfied);
  EXPECT_TRUE(alpha->informational);
  EXPECT_TRUE(find(r.reversibility, "beta(x) = 1")->satisfied);
  EXPECT_EQ(r.symmetry.verdict, Existence::hypotheses_violated);
}

TEST(Lienard, EvenDamping) {
  FamilyClassification r = classify_lienard(X("x^2"), X("x"), {-1, 1});
  ASSERT_EQ(r.symmetry.verdict, Existence::exists);
  EXPECT_EQ(show(*r.symmetry.sigma), "-x, -y");
  for (const auto& [name, v] : r.symmetry.verification) {
    EXPECT_TRUE(v.holds()) << name;
    EXPECT_EQ(v.certainty, Certainty::certain) << name;
  }
  EXPECT_TRUE(find(r.symmetry, "alpha(x) = -x")->satisfied);
  EXPECT_TRUE(find(r.symmetry, "beta(x) = -1")->satisfied);
  EXPECT_EQ(r.reversibility.verdict, Existence::hypotheses_violated);
}

TEST(Lienard, MirroredDampingSigns) {
  FamilyClassification r = classify_lienard(X("-x^2"), X("x"), {-1, 1});
  EXPECT_EQ(r.symmetry.verdict, Existence::exists);
  EXPECT_TRUE(find(r.symmetry, "x f'(x) < 0")->satisfied);
}

TEST(Lienard, MixedParityRefuted) {
  // On (-1, 1) f' = 3x^2 + 2x changes sign left of 0 and both routes lose
  // their hypotheses, so the smaller interval is used.
  FamilyClassification r = classify_lienard(X("x^3 + x^2"), X("x"), {-0.5, 0.5});
  EXPECT_EQ(r.reversibility.verdict, Existence::hypotheses_violated);
  ASSERT_EQ(r.symmetry.verdict, Existence::not_exists);
  EXPECT_EQ(r.overall(), Existence::not_exists);
  ASSERT_FALSE(r.symmetry.witnesses.empty());
  const double x = r.symmetry.witnesses.front().point[0];
  // f(x) - f(-x) = 2x^3.
  EXPECT_NEAR(r.symmetry.witnesses.front().residual, std::abs(2 * x * x * x), 1e-12);
  EXPECT_FALSE(find(r.symmetry, "f even")->satisfied);

  FamilyClassification wide = classify_lienard(X("x^3 + x^2"), X("x"), {-1, 1});
  EXPECT_EQ(wide.overall(), Existence::hypotheses_violated);
}

TEST(Lienard, OddRestoringTermRequired) {
  FamilyClassification r = classify_lienard(X("x^3"), X("x + x^2"), {-0.5, 0.5});
  EXPECT_EQ(r.reversibility.verdict, Existence::not_exists);
  EXPECT_FALSE(find(r.reversibility, "g odd")->satisfied);
}

TEST(Lienard, CubicRestoringSymmetry) {
  FamilyClassification r = classify_lienard(X("x^2"), X("x^3"), {-1, 1});
  ASSERT_EQ(r.symmetry.verdict, Existence::exists);
  EXPECT_EQ(show(*r.symmetry.sigma), "-x, -y");
}

TEST(Lienard, EvenRestoringTermViolatesHypotheses) {
  FamilyClassification r = classify_lienard(X("x^2"), X("x^2"), {-1, 1});
  EXPECT_EQ(r.symmetry.verdict, Existence::hypotheses_violated);
  EXPECT_EQ(r.reversibility.verdict, Existence::hypotheses_violated);
  EXPECT_FALSE(find(r.symmetry, "x g(x) > 0")->satisfied);
  EXPECT_NE(r.symmetry.notes.find("x g(x) > 0"), std::string::npos);
}

TEST(Lienard, TranscendentalTermsAreSampled) {
  FamilyClassification r = classify_lienard(X("sin(x)"), X("x + x^3"), {-1, 1});
  EXPECT_EQ(r.reversibility.verdict, Existence::exists);
  EXPECT_EQ(find(r.reversibility, "f'(x) > 0")->certainty, Certainty::probabilistic);
}

TEST(Lienard, Preconditions) {
  EXPECT_THROW(classify_lienard(X("x"), X("x"), {0.1, 1}), std::invalid_argument);
  EXPECT_THROW(classify_lienard(X("y"), X("x"), {-1, 1}), std::invalid_argument);
}

// Property: an existing map passes every structural check with certainty.
TEST(Property, ExistsImpliesVerified) {
  std::vector<FamilyClassification> corpus;
  for (long a = -2; a <= 2; ++a) {
    for (long d = -2; d <= 2; ++d) corpus.push_back(classify_lotka_volterra(q(a), q(2), q(-3), q(d)));
  }
  for (const char* f : {"x^3", "x^2", "x^3 + x", "x^4 + x^2", "-x^2", "x^5"}) {
    for (const char* g : {"x", "x^3", "x + x^3", "x + x^2"}) corpus.push_back(classify_lienard(X(f), X(g), {-1, 1}));
  }
  int found = 0;
  for (const auto& fc : corpus) {
    for (const Classification* c : {&fc.reversibility, &fc.symmetry}) {
      if (c->verdict != Existence::exists) continue;
      ++found;
      ASSERT_TRUE(c->sigma);
      EXPECT_TRUE(check_structural(fc.field, *c->sigma, c->kind, fc.field.domain()).holds());
      EXPECT_TRUE(is_involution(*c->sigma, fc.field.domain()).holds());
      EXPECT_TRUE(is_measure_preserving(*c->sigma, fc.field.domain()).holds());
    }
  }
  EXPECT_GE(found, 10);
}

// Property: the closed-form LV answer is decided by exact arithmetic alone.
TEST(Property, LotkaVolterraExactConditions) {
  for (long a = -3; a <= 3; ++a) {
    for (long d = -3; d <= 3; ++d) {
      FamilyClassification r = classify_lotka_volterra(q(a), q(1), q(2), q(d));
      EXPECT_EQ(r.reversibility.verdict == Existence::exists, a == d);
      EXPECT_EQ(r.symmetry.verdict == Existence::exists, a + d == 0);
    }
  }
}

}  // namespace
}  // namespace symflow
