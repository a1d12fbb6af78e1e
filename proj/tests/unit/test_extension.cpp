#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "lensbell/extension.hpp"

using namespace lensbell;

namespace {

LensDomain disk_lens(double r) {
  return LensDomain(ConvexBody::ball(make_point(0, 0), 1.0), ConvexBody::ball(make_point(0, 0), r));
}

Point on(double r, double th) { return make_point(r * std::cos(th), r * std::sin(th)); }

struct Affine : ::testing::Test {
  static void SetUpTestSuite() {
    lens = new LensDomain(disk_lens(0.4));
    f = new BoundaryFunction(BoundaryFunction::affine(make_point(1, 2), 0.25));
    SolverConfig c;
    c.h = 0.02;
    field = new ScalarField(solve_bs(*lens, *f, c));
  }
  static void TearDownTestSuite() {
    delete lens;
    delete f;
    delete field;
  }
  static LensDomain* lens;
  static BoundaryFunction* f;
  static ScalarField* field;
};

LensDomain* Affine::lens = nullptr;
BoundaryFunction* Affine::f = nullptr;
ScalarField* Affine::field = nullptr;

}  // namespace

TEST_F(Affine, SuperdifferentialIsTheLinearPart) {
  for (double th : {0.2, 1.7, 3.9, 5.5}) {
    Point x = on(0.4, th);
    auto sd = superdifferential_at(*field, *lens, *f, x);
    EXPECT_NEAR(sd.functional.coeffs[0], 1.0, 1e-6) << th;
    EXPECT_NEAR(sd.functional.coeffs[1], 2.0, 1e-6) << th;
    EXPECT_NEAR(sd.functional.value, (*f)(x), 1e-6);
    auto chk = check_supporting(*field, *lens, sd.functional, 300);
    EXPECT_GT(chk.points, 0);
    EXPECT_LE(chk.worst_excess, 1e-6);
  }
}

TEST_F(Affine, PerturbationSandwich) {
  auto p0 = strong_concavity_perturb(*field, *lens, 0.0);
  EXPECT_EQ(p0.field.values().size(), field->values().size());
  const auto& g = field->grid();
  for (size_t k = 0; k < g.size(); ++k) {
    double a = field->values()[k], b = p0.field.values()[k];
    EXPECT_TRUE((std::isnan(a) && std::isnan(b)) || a == b);
  }
  const double eps = 0.05;
  auto p = strong_concavity_perturb(*field, *lens, eps);
  double lo = INFINITY, hi = -INFINITY;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!field->reached(i, j)) continue;
      double d = p.field.at(i, j) - field->at(i, j);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      EXPECT_NEAR(d, eps * p.g(g.node(i, j)), 1e-15);
    }
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LE(hi, eps);
}

TEST_F(Affine, LiftAddsGradient) {
  auto p = strong_concavity_perturb(*field, *lens, 0.1);
  Point x = on(0.4, 1.0);
  LinearFunctional L{make_point(1, 2), (*f)(x), x};
  auto lifted = p.lift(L);
  EXPECT_NEAR(lifted.value, L.value + 0.1 * p.g(x), 1e-15);
  EXPECT_LT((lifted.coeffs - (L.coeffs + 0.1 * p.grad_g(x))).norm(), 1e-15);
  // g is strongly concave: values below every tangent plane
  Point y = on(0.7, 2.0);
  EXPECT_LT(p.g(y), p.g(x) + p.grad_g(x).dot(y - x));
}

TEST_F(Affine, FreeExtensionKeepsField) {
  auto ext = extend_through_free(*field, *lens, *f, 0.0);
  ASSERT_TRUE(ext.ok) << ext.note;
  EXPECT_GT(ext.level, 0.0);
  EXPECT_LT(ext.level, 1.0);
  const auto& g = field->grid();
  double worst = 0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (field->reached(i, j)) worst = std::max(worst, std::abs(ext.field.at(i, j) - field->at(i, j)));
    }
  }
  EXPECT_LE(worst, 1e-12);
  // the new region carries the affine function too
  for (double th : {0.4, 2.2, 4.0}) {
    Point z = on(0.4 * (1 + ext.level) / 2, th);
    auto v = ext.value(z);
    ASSERT_TRUE(v);
    EXPECT_NEAR(*v, (*f)(z), 1e-6);
  }
}

TEST_F(Affine, FixedExtensionIsAffine) {
  auto ext = extend_through_fixed(*field, *lens, 0.2);
  ASSERT_TRUE(ext.ok) << ext.note;
  for (double th : {0.1, 1.5, 3.3}) {
    Point z = on(1.1, th);
    auto v = ext.value(z);
    ASSERT_TRUE(v);
    EXPECT_NEAR(*v, (*f)(z), 1e-3);
  }
  EXPECT_THROW(extend_through_fixed(*field, *lens, 0.0), ExtensionError);
}

TEST_F(Affine, RegressionIsDegenerate) {
  auto rr = boundary_regression(*field, *lens, *f, 48);
  EXPECT_TRUE(rr.degenerate);
  EXPECT_LT(rr.max_gap, 1e-9);
}

TEST(Extension, ZeroFunctionalHasZeroSlope) {
  auto lens = disk_lens(0.4);
  SolverConfig c;
  c.h = 0.02;
  auto F = solve_bs(lens, BoundaryFunction::zero(), c);
  auto sd = superdifferential_at(F, lens, BoundaryFunction::zero(), make_point(0, -0.4));
  EXPECT_NEAR(sd.ell, 0.0, 1e-12);
  EXPECT_NEAR(sd.functional.value, 0.0, 1e-12);
  EXPECT_LE(sd.a, 1e-12);
}

TEST(Extension, RejectsUnboundedLens) {
  LensDomain bmo(ConvexBody::paraboloid(2, 0), ConvexBody::paraboloid(2, 1));
  SolverConfig c;
  c.h = 0.1;
  c.box = Box{-1, 0, 1, 2};
  auto F = solve_bs(bmo, BoundaryFunction::zero(), c);
  EXPECT_THROW(strong_concavity_perturb(F, bmo, 0.1), ExtensionError);
  EXPECT_THROW(extend_through_free(F, bmo, BoundaryFunction::zero(), 0.1), ExtensionError);
}

TEST(Extension, CosineDataSupportingInequality) {
  auto lens = disk_lens(0.4);
  SolverConfig c;
  c.h = 0.02;
  auto f = BoundaryFunction::cos_angle(1);
  auto F = solve_bs(lens, f, c);
  auto sd = superdifferential_at(F, lens, f, make_point(0, -0.4));
  EXPECT_TRUE(std::isfinite(sd.a));
  auto chk = check_supporting(F, lens, sd.functional, 1000);
  EXPECT_EQ(chk.points, 1000);
  EXPECT_LE(chk.worst_excess, 1e-6);
}
