#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "symflow/candidates.hpp"
#include "symflow/parse.hpp"

namespace symflow {
namespace {

VectorField field(const char* a, const char* b, DomainBox box) {
  return VectorField({parse(a, 2), parse(b, 2)}, box);
}

bool has_root(const std::vector<CandidateRoot>& roots, Point p, double tol = 1e-8) {
  for (const auto& r : roots) {
    if (std::abs(r.point[0] - p[0]) < tol && std::abs(r.point[1] - p[1]) < tol) return true;
  }
  return false;
}

const DomainBox kWide = DomainBox::cube(2, -2, 4);

TEST(CandidateFromDelta, PredatorPreyTwoBranches) {
  VectorField f = field("x*(1 - 2*y)", "y*(3*x - 1)", kWide);
  auto roots = candidate_from_delta(f, Selection::leading(2), CheckKind::reversibility, Point{1, 0.4});
  EXPECT_TRUE(has_root(roots, {-2.0 / 3, 0.1}));
  EXPECT_TRUE(has_root(roots, {0.8 / 3, 1.5}));
  for (const auto& r : roots) EXPECT_LT(r.residual, 1e-10);
}

TEST(CandidateFromDelta, PredatorPreySymmetry) {
  VectorField f = field("x*(1 - y)", "y*(x + 1)", kWide);
  auto roots = candidate_from_delta(f, Selection::leading(2), CheckKind::symmetry, Point{0.5, 0.7});
  EXPECT_TRUE(has_root(roots, {-0.7, -0.5}));
}

TEST(CandidateFromDelta, SymmetryKeepsTrivialRoot) {
  for (auto f : {field("y + x^2", "-x - x^3", kWide), field("x*(1 - y)", "y*(x + 1)", kWide),
                 field("x^2 + y", "y^2 - x", kWide)}) {
    Point z{0.3, 0.45};
    auto roots = candidate_from_delta(f, Selection::leading(2), CheckKind::symmetry, z);
    bool trivial = false;
    for (const auto& r : roots) {
      if (r.trivial) {
        trivial = true;
        EXPECT_LT(std::abs(r.point[0] - z[0]) + std::abs(r.point[1] - z[1]), 1e-6);
      }
    }
    EXPECT_TRUE(trivial);
  }
}

TEST(CandidateFromDelta, SingularPointIsAnError) {
  // J_Delta = [[2, 0], [4x, 2]] for (y + x^2, -x); use a field whose Delta
  // Jacobian vanishes at the origin instead.
  VectorField f = field("y", "-x - y*x^2", kWide);
  EXPECT_THROW(candidate_from_delta(f, Selection::leading(2), CheckKind::reversibility, Point{0, 0}),
               CandidateError);
}

TEST(Rationalize, Values) {
  EXPECT_EQ(*rationalize(2.0 / 3), make_rational(2, 3));
  EXPECT_EQ(*rationalize(-1.5), make_rational(-3, 2));
  EXPECT_EQ(*rationalize(1e-12), make_rational(0));
  EXPECT_FALSE(rationalize(std::sqrt(2.0), 100, 1e-9));
}

TEST(CandidateTable, PredatorPrey) {
  VectorField f = field("x*(1 - 2*y)", "y*(3*x - 1)", kWide);
  TableOptions opt{DomainBox::cube(2, 0.2, 2)};
  CandidatePointMap m = candidate_map_table(f, Selection::leading(2), CheckKind::reversibility, opt);
  ASSERT_TRUE(m.verdict.holds()) << m.verdict.notes;
  std::size_t regular = m.grid_points - m.singular_points;
  std::size_t close = 0;
  for (const auto& e : m.table) {
    if (e.singular || e.image.empty()) continue;
    if (std::abs(e.image[0] - 2 * e.z[1] / 3) < 1e-9 && std::abs(e.image[1] - 3 * e.z[0] / 2) < 1e-9) ++close;
  }
  EXPECT_GE(close, static_cast<std::size_t>(0.95 * static_cast<double>(regular)));
  ASSERT_TRUE(m.fitted);
  EXPECT_EQ(to_string((*m.fitted)[0]), "2/3*y");
  EXPECT_EQ(to_string((*m.fitted)[1]), "3/2*x");
  ASSERT_TRUE(m.fitted_check);
  EXPECT_TRUE(m.fitted_check->holds());
}

TEST(CandidateTable, WorkedExample) {
  VectorField f = field("y + x^2", "-x - x^3", DomainBox::cube(2, -2, 2));
  TableOptions opt{DomainBox::cube(2, -1, 1)};
  CandidatePointMap m = candidate_map_table(f, Selection::leading(2), CheckKind::reversibility, opt);
  ASSERT_TRUE(m.verdict.holds()) << m.verdict.notes;
  ASSERT_TRUE(m.fitted);
  EXPECT_LT(m.fit_residual, 1e-8);
  EXPECT_EQ(to_string((*m.fitted)[0]), "-x");
  EXPECT_EQ(to_string((*m.fitted)[1]), "y");
  EXPECT_TRUE(m.fitted_check->holds());
}

TEST(CandidateTable, NonOddRestoringTerm) {
  VectorField f = field("y + x^2", "-x - x^2", DomainBox::cube(2, -2, 2));
  TableOptions opt{DomainBox::cube(2, -1, 1)};
  CandidatePointMap rev = candidate_map_table(f, Selection::leading(2), CheckKind::reversibility, opt);
  ASSERT_TRUE(rev.fitted) << rev.verdict.notes;
  EXPECT_EQ(to_string((*rev.fitted)[0]), "-x");
  EXPECT_EQ(to_string((*rev.fitted)[1]), "y");
  ASSERT_TRUE(rev.fitted_check);
  EXPECT_TRUE(rev.fitted_check->fails());
  EXPECT_TRUE(rev.verdict.fails());

  CandidatePointMap sym = candidate_map_table(f, Selection::leading(2), CheckKind::symmetry, opt);
  EXPECT_TRUE(sym.trivial_only);
  EXPECT_EQ(sym.verdict.status, Status::inconclusive);
  EXPECT_FALSE(sym.fitted);
}

TEST(CandidateTable, PredatorPreyWithoutReversibility) {
  // a != d: no branch is both involution-consistent and a reversibility.
  VectorField f = field("x*(1 - 2*y)", "y*(3*x - 2)", kWide);
  TableOptions opt{DomainBox::cube(2, 0.2, 2)};
  CandidatePointMap m = candidate_map_table(f, Selection::leading(2), CheckKind::reversibility, opt);
  EXPECT_FALSE(m.verdict.holds()) << m.verdict.notes;
  for (const auto& b : m.branches) EXPECT_GT(b.structural_residual, 1e-3);
  if (m.verdict.fails()) EXPECT_FALSE(m.verdict.witnesses.empty());
  if (m.fitted_check) EXPECT_TRUE(m.fitted_check->fails());
}

TEST(CandidateTable, CsvLayout) {
  VectorField f = field("y + x^2", "-x - x^3", DomainBox::cube(2, -2, 2));
  TableOptions opt{DomainBox::cube(2, -1, 1), 4};
  CandidatePointMap m = candidate_map_table(f, Selection::leading(2), CheckKind::reversibility, opt);
  std::ostringstream os;
  write_candidate_csv(os, m, 2);
  std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "index,x,y,image_x,image_y,branch,residual");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 17);
}

// Property: each tabulated pair solves the Delta equation.
TEST(Property, TableEntriesSolveDeltaEquation) {
  std::vector<std::pair<VectorField, CheckKind>> corpus{
      {field("x*(1 - 2*y)", "y*(3*x - 1)", kWide), CheckKind::reversibility},
      {field("y + x^2", "-x - x^3", DomainBox::cube(2, -2, 2)), CheckKind::reversibility},
      {field("x*(1 - y)", "y*(x + 1)", kWide), CheckKind::symmetry},
  };
  for (const auto& [f, kind] : corpus) {
    TableOptions opt{DomainBox::cube(2, 0.2, 1), 8};
    CandidatePointMap m = candidate_map_table(f, Selection::leading(2), kind, opt);
    for (const auto& e : m.table) {
      if (e.image.empty()) continue;
      EXPECT_LT(e.residual, 1e-10);
    }
  }
}

}  // namespace
}  // namespace symflow
