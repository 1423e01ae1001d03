#include <gtest/gtest.h>

#include <random>

#include "symflow/checks.hpp"
#include "symflow/flow.hpp"
#include "symflow/parse.hpp"

namespace symflow {
namespace {

const DomainBox kSquare = DomainBox::cube(2, -2, 2);

VectorField field(const char* a, const char* b, DomainBox box = kSquare) {
  return VectorField({parse(a, 2), parse(b, 2)}, box);
}

SmoothMap map(const char* a, const char* b, DomainBox box = kSquare) {
  return SmoothMap({parse(a, 2), parse(b, 2)}, box);
}

TEST(Structural, Examples) {
  Verdict lienard = check_structural(field("y", "-x - y*x^3"), map("-x", "y"), CheckKind::reversibility, kSquare);
  EXPECT_TRUE(lienard.holds());
  EXPECT_EQ(lienard.certainty, Certainty::certain);

  Verdict lv = check_structural(field("x*(1 - 2*y)", "y*(3*x - 1)"), map("2*y/3", "3*x/2"),
                                CheckKind::reversibility, kSquare);
  EXPECT_TRUE(lv.holds());
  EXPECT_EQ(lv.certainty, Certainty::certain);

  Verdict pendulum = check_structural(field("y", "-sin(x)"), map("-x", "-y"), CheckKind::symmetry, kSquare);
  EXPECT_TRUE(pendulum.holds());
}

TEST(Structural, FailureCarriesWitness) {
  Verdict v = check_structural(field("y + x^2", "-x - x^2"), map("-x", "y"), CheckKind::reversibility, kSquare);
  EXPECT_TRUE(v.fails());
  EXPECT_EQ(v.certainty, Certainty::certain);
  EXPECT_FALSE(v.witnesses.empty());
  EXPECT_GT(v.residual_max, 0.0);
}

TEST(TowerTransform, ReversibleQuadratic) {
  TowerTransformReport r =
      check_tower_transform(field("x^2", "y^2"), map("-x", "-y"), CheckKind::reversibility, 3, kSquare);
  EXPECT_TRUE(r.verdict.holds());
  EXPECT_EQ(r.signs, (std::vector<int>{-1, 1, -1, 1}));
  for (const auto& v : r.orders) {
    EXPECT_TRUE(v.holds());
    EXPECT_EQ(v.certainty, Certainty::certain);
  }
}

TEST(TowerTransform, PredatorPreyFirstOrders) {
  TowerTransformReport r = check_tower_transform(field("x*(1 - 2*y)", "y*(3*x - 1)"), map("2*y/3", "3*x/2"),
                                                 CheckKind::reversibility, 1, kSquare);
  ASSERT_EQ(r.orders.size(), 2u);
  EXPECT_TRUE(r.orders[0].holds());
  EXPECT_TRUE(r.orders[1].holds());
}

TEST(TowerTransform, IdentityIsAlwaysSymmetry) {
  VectorField f = field("y + sin(x*y)", "-x^3 + exp(y)/3");
  TowerTransformReport r = check_tower_transform(f, SmoothMap::identity(kSquare), CheckKind::symmetry, 2, kSquare);
  EXPECT_TRUE(r.verdict.holds());
  EXPECT_EQ(r.signs, (std::vector<int>{1, 1, 1}));
}

TEST(TowerTransform, BrokenReversibilityFails) {
  // a != d.
  TowerTransformReport r = check_tower_transform(field("x*(1 - 2*y)", "y*(3*x - 2)"), map("2*y/3", "3*x/2"),
                                                 CheckKind::reversibility, 1, kSquare);
  EXPECT_TRUE(r.verdict.fails());
  EXPECT_TRUE(r.orders[0].fails());
}

TEST(FixedPoints, MirrorLine) {
  // D = 2x and D'' vanish on x = 0.
  Verdict v = check_fixed_points_even_orders(field("y + x^2", "-x^3"), map("-x", "y"), kSquare, 1);
  EXPECT_TRUE(v.holds()) << v.notes;
  EXPECT_EQ(v.certainty, Certainty::certain);
  EXPECT_NE(v.notes.find("t1"), std::string::npos);
}

TEST(FixedPoints, PointReflection) {
  Verdict v = check_fixed_points_even_orders(field("x^2", "y^2"), map("-x", "-y"), kSquare, 1);
  EXPECT_TRUE(v.holds());
  EXPECT_EQ(v.certainty, Certainty::certain);
}

TEST(FixedPoints, SymmetryCounterexampleFails) {
  DomainBox line = DomainBox::cube(1, -1, 1);
  VectorField f({parse("x", 1)}, line);
  SmoothMap sigma({parse("-x", 1)}, line);
  Verdict v = check_fixed_points_even_orders(f, sigma, line, 0);
  EXPECT_TRUE(v.fails());
  ASSERT_FALSE(v.witnesses.empty());
  EXPECT_EQ(v.witnesses.front().point, Point{0.0});
  EXPECT_DOUBLE_EQ(v.witnesses.front().residual, 1.0);
  // The same map is a symmetry of this field.
  EXPECT_TRUE(check_structural(f, sigma, CheckKind::symmetry, line).holds());
}

TEST(FixedPoints, NonAffineMap) {
  // x -> x, y -> x^2 - y fixes the parabola y = x^2 / 2.
  FixedSet s = find_fixed_points(map("x", "x^2 - y"), kSquare);
  EXPECT_FALSE(s.exact);
  ASSERT_FALSE(s.points.empty());
  for (const auto& p : s.points) EXPECT_NEAR(p[1], p[0] * p[0] / 2, 1e-10);
}

TEST(FixedPoints, NoneInBox) {
  Verdict v = check_fixed_points_even_orders(field("y", "-x"), map("x + 1", "y"), kSquare, 0);
  EXPECT_EQ(v.status, Status::inconclusive);
}

TEST(LevelSet, NullDivergenceLine) {
  Verdict v = check_level_set_invariance(field("x^2", "y^2"), map("-x", "-y"), CheckKind::reversibility, 0, {0.0},
                                         kSquare);
  EXPECT_TRUE(v.holds());
  EXPECT_EQ(v.skipped, 0u);
}

TEST(LevelSet, PredatorPreyRateLevel) {
  Verdict v = check_level_set_invariance(field("x*(1 - 2*y)", "y*(3*x - 1)"), map("2*y/3", "3*x/2"),
                                         CheckKind::reversibility, 1, {1.0, -0.5}, DomainBox::cube(2, 0, 1));
  EXPECT_TRUE(v.holds()) << v.notes;
}

TEST(LevelSet, SymmetryArbitraryLevel) {
  Verdict v = check_level_set_invariance(field("y", "-x - y*x^2"), map("-x", "-y"), CheckKind::symmetry, 0,
                                         {-0.7, 0.0}, DomainBox::cube(2, -1, 1));
  EXPECT_TRUE(v.holds()) << v.notes;
}

TEST(LevelSet, UnreachableLevelIsInconclusive) {
  Verdict v = check_level_set_invariance(field("y", "-x - y*x^2"), map("-x", "-y"), CheckKind::symmetry, 0, {5.0},
                                         DomainBox::cube(2, -1, 1));
  EXPECT_EQ(v.status, Status::inconclusive);
}

TEST(DeltaSingularity, Examples) {
  Selection pi = Selection::leading(2);
  Verdict lienard = check_delta_noninvertibility(field("y", "-x - y*x^2"), Point{0, 0}, pi, map("-x", "-y"));
  EXPECT_TRUE(lienard.holds());

  // a + d = 0 at the origin.
  Verdict lv = check_delta_noninvertibility(field("x*(1 - y)", "y*(x + 1)"), Point{0, 0}, pi);
  EXPECT_TRUE(lv.holds());

  Verdict counter = check_delta_noninvertibility(field("y + x^2", "-x"), Point{0, 0}, pi);
  EXPECT_TRUE(counter.fails());
  EXPECT_NEAR(counter.residual_max, 4.0, 1e-12);

  Verdict moved = check_delta_noninvertibility(field("y", "-x"), Point{1, 0}, pi, map("-x", "y"));
  EXPECT_EQ(moved.status, Status::inconclusive);
}

// Property suites.

struct Pair {
  VectorField f;
  SmoothMap sigma;
  CheckKind kind;
};

std::vector<Pair> corpus() {
  DomainBox wide = DomainBox::cube(2, 0.1, 3);
  return {
      {field("y + x^2", "-x - x^3"), map("-x", "y"), CheckKind::reversibility},
      {field("x^2", "y^2"), map("-x", "-y"), CheckKind::reversibility},
      {field("x*(1 - 2*y)", "y*(3*x - 1)", wide), map("2*y/3", "3*x/2", wide), CheckKind::reversibility},
      {field("x*(1 - y)", "y*(x + 1)"), map("-y", "-x"), CheckKind::symmetry},
      {field("y", "-x - y*x^3"), map("-x", "y"), CheckKind::reversibility},
      {field("y", "-x - y*x^2"), map("-x", "-y"), CheckKind::symmetry},
      {field("y", "-sin(x)"), map("-x", "-y"), CheckKind::symmetry},
  };
}

TEST(Property, StructuralImpliesTowerLaw) {
  for (const auto& c : corpus()) {
    Verdict s = check_structural(c.f, c.sigma, c.kind, c.f.domain());
    ASSERT_TRUE(s.holds());
    if (s.certainty != Certainty::certain) continue;
    EXPECT_TRUE(check_tower_transform(c.f, c.sigma, c.kind, 3, c.f.domain()).verdict.holds());
  }
}

TEST(Property, StructuralImpliesFlowRelation) {
  for (const auto& c : corpus()) {
    FlowCheckOptions opt;
    opt.samples = 20;
    opt.region = c.f.domain().scaled(0.25);
    opt.integrator.horizon = 0.5;
    Verdict v = check_flow_relation(c.f, c.sigma, c.kind, opt);
    EXPECT_TRUE(v.holds()) << to_string(c.f[0]) << " " << v.residual_max << " " << v.notes;
  }
}

TEST(Property, IdentityIsSymmetryOfAnyField) {
  for (const auto& c : corpus()) {
    EXPECT_TRUE(check_structural(c.f, SmoothMap::identity(c.f.domain()), CheckKind::symmetry, c.f.domain()).holds());
  }
}

TEST(Property, ReversibilityExcludesSymmetry) {
  for (const auto& c : corpus()) {
    CheckKind other = c.kind == CheckKind::symmetry ? CheckKind::reversibility : CheckKind::symmetry;
    EXPECT_TRUE(check_structural(c.f, c.sigma, other, c.f.domain()).fails()) << to_string(c.f[0]);
  }
}

TEST(Property, ResidualMonotoneInTrials) {
  VectorField f = field("y", "-sin(x) + x^3/100");
  SmoothMap sigma = map("-x", "-y");
  double previous = 0.0;
  for (std::size_t trials : {8u, 32u, 128u, 512u}) {
    ZeroTestOptions opt;
    opt.trials = trials;
    Verdict v = check_structural(f, sigma, CheckKind::reversibility, kSquare, opt);
    EXPECT_GE(v.residual_max, previous);
    EXPECT_EQ(v.certainty, Certainty::probabilistic);
    previous = v.residual_max;
  }
}

}  // namespace
}  // namespace symflow
