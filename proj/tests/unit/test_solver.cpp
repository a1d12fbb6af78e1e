#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "lensbell/scenarios.hpp"
#include "lensbell/solver.hpp"

using namespace lensbell;

namespace {

LensDomain disk_lens(double r) {
  return LensDomain(ConvexBody::ball(make_point(0, 0), 1.0), ConvexBody::ball(make_point(0, 0), r));
}

SolverConfig coarse() {
  SolverConfig c;
  c.h = 0.02;
  return c;
}

double max_error(const ScalarField& F, const BoundaryFunction& f) {
  double worst = 0;
  const auto& g = F.grid();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!F.reportable(i, j)) continue;
      if (!F.reached(i, j)) return INFINITY;
      worst = std::max(worst, std::abs(F.at(i, j) - f(g.node(i, j))));
    }
  }
  return worst;
}

}  // namespace

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.h = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.tol = 1e-12;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.directions = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Solver, UnboundedNeedsBox) {
  LensDomain bmo(ConvexBody::paraboloid(2, 0), ConvexBody::paraboloid(2, 1));
  EXPECT_THROW(solve_bs(bmo, BoundaryFunction::zero(), SolverConfig{}), SolverError);
}

TEST(Solver, LatticeDirections) {
  auto d = lattice_directions(48);
  ASSERT_EQ(d.size(), 48u);
  EXPECT_EQ(d[0], std::make_pair(1, 0));
  EXPECT_EQ(d[1], std::make_pair(0, 1));
  for (auto [a, b] : d) EXPECT_EQ(std::gcd(std::abs(a), std::abs(b)), 1);
}

TEST(Solver, AffineIsFixedPoint) {
  auto f = BoundaryFunction::affine(make_point(1, 2), 0);
  auto F = solve_bs(disk_lens(0.4), f, coarse());
  EXPECT_TRUE(F.meta.converged);
  EXPECT_LE(max_error(F, f), 2e-3);
}

TEST(Solver, ZeroFunction) {
  auto F = solve_bs(disk_lens(0.4), BoundaryFunction::zero(), coarse());
  EXPECT_EQ(F.reached_count(), F.masked_count());
  EXPECT_EQ(F.sup_norm(), 0.0);
}

TEST(Solver, IteratesIncrease) {
  // the value only ever grows, so every recorded update is nonnegative
  auto F = solve_bs(disk_lens(0.4), BoundaryFunction::cos_angle(2), coarse());
  ASSERT_FALSE(F.meta.updates.empty());
  for (double u : F.meta.updates) EXPECT_GE(u, 0.0);
  EXPECT_LE(F.meta.last_update, SolverConfig{}.tol);
}

TEST(Solver, CheeseCentreUnreached) {
  auto cheese = *canned_domain("cheese").lens;
  auto F = solve_bs(cheese, BoundaryFunction::zero(), coarse());
  const auto& g = F.grid();
  int i = static_cast<int>(std::lround(-g.x0 / g.h)), j = static_cast<int>(std::lround(-g.y0 / g.h));
  ASSERT_TRUE(F.masked(i, j));
  EXPECT_FALSE(F.reached(i, j));
  EXPECT_LT(F.reached_count(), F.masked_count());
  EXPECT_GT(F.reached_count(), 0u);
}

TEST(Concavity, AffinePasses) {
  auto f = BoundaryFunction::affine(make_point(0.5, -1), 0.3);
  auto F = solve_bs(disk_lens(0.4), f, coarse());
  ConcavityOptions o;
  o.tol = 1e-9;
  auto rep = check_local_concavity(F, disk_lens(0.4), o);
  EXPECT_TRUE(rep.passed) << rep.worst_defect;
  EXPECT_GT(rep.segments, 0);
}

TEST(Concavity, BumpedNodeFails) {
  auto lens = disk_lens(0.4);
  auto F = solve_bs(lens, BoundaryFunction::affine(make_point(1, 0), 0), coarse());
  const auto& g = F.grid();
  int i = static_cast<int>(std::lround((0.0 - g.x0) / g.h)), j = static_cast<int>(std::lround((-0.7 - g.y0) / g.h));
  ASSERT_TRUE(F.reached(i, j));
  F.at(i, j) -= 0.1;
  auto rep = check_local_concavity(F, lens);
  ASSERT_FALSE(rep.passed);
  ASSERT_FALSE(rep.violations.empty());
  Point bump = g.node(i, j);
  double nearest = INFINITY;
  for (const auto& v : rep.violations) {
    Point at = v.a + v.t * (v.b - v.a);
    nearest = std::min(nearest, (at - bump).norm());
  }
  EXPECT_LT(nearest, 2 * g.h);
}

TEST(Concavity, ZeroEvaluatorOnCheese) {
  auto cheese = *canned_domain("cheese").lens;
  Evaluator zero = [](const Point&) { return std::optional<double>(0.0); };
  ConcavityOptions o;
  o.tol = 1e-9;
  auto rep = check_local_concavity(zero, cheese, Box{-1, -1, 1, 1}, 0.02, 1.0, o);
  EXPECT_TRUE(rep.passed);
  EXPECT_GT(rep.segments, 0);
}

TEST(Compare, ZeroAndAffine) {
  auto lens = disk_lens(0.4);
  auto z = compare_domains(lens, BoundaryFunction::zero(), coarse());
  EXPECT_EQ(z.sup_difference, 0.0);
  EXPECT_GT(z.common_nodes, 0u);
  auto a = compare_domains(lens, BoundaryFunction::affine(make_point(1, 1), 0), coarse());
  EXPECT_LE(a.sup_difference, 4e-3);
}

TEST(Continuation, AffineAndZero) {
  auto lens = disk_lens(0.4);
  auto f = BoundaryFunction::affine(make_point(1, 2), 0.5);
  auto F = solve_bs(lens, f, coarse());
  for (double th : {0.3, 1.9, 4.4}) {
    Point x = 0.4 * make_point(std::cos(th), std::sin(th));
    auto c = free_boundary_continuation(F, lens, x);
    EXPECT_NEAR(c.value, f(x), 2e-3);
    EXPECT_GT(c.s2, c.s1);
  }
  auto Z = solve_bs(lens, BoundaryFunction::zero(), coarse());
  EXPECT_EQ(free_boundary_continuation(Z, lens, make_point(0, -0.4)).value, 0.0);
  EXPECT_THROW(free_boundary_continuation(Z, lens, make_point(0, -0.6)), SolverError);
}

TEST(Continuation, TwoTransversalsAgreeOnChannel) {
  auto lens = *canned_domain("channel").lens;
  SolverConfig c = coarse();
  auto F = solve_bs(lens, BoundaryFunction::channel(), c);
  auto low = lens.holes()[0].boundary_point(-std::numbers::pi / 2);
  ASSERT_TRUE(low);
  auto v1 = free_boundary_continuation(F, lens, *low);
  auto v2 = free_boundary_continuation(F, lens, *low, make_point(0.3, -1).normalized());
  EXPECT_TRUE(std::isfinite(v1.value));
  EXPECT_NEAR(v1.value, v2.value, 2 * c.h);
}

TEST(Field, InterpolationNeedsReachedCorners) {
  GridSpec g{0, 0, 1, 2, 2};
  ScalarField F(g, {1, 1, 1, 1});
  F.at(0, 0) = 0;
  F.at(1, 0) = 1;
  F.at(0, 1) = 2;
  EXPECT_FALSE(F.interpolate(make_point(0.5, 0.5)));
  F.at(1, 1) = 3;
  EXPECT_NEAR(*F.interpolate(make_point(0.5, 0.5)), 1.5, 1e-15);
}
