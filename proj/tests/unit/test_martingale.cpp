#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lensbell/martingale.hpp"
#include "lensbell/scenarios.hpp"

using namespace lensbell;

namespace {

LensDomain disk_lens(double r) {
  return LensDomain(ConvexBody::ball(make_point(0, 0), 1.0), ConvexBody::ball(make_point(0, 0), r));
}

Point on_circle(double th) { return make_point(std::cos(th), std::sin(th)); }

// clear chord at height 0.75 split in half
SimpleMartingale upper_split() {
  double th = std::asin(0.75);
  return SimpleMartingale::two_point(make_point(0, 0.75), on_circle(th), 0.5, on_circle(std::numbers::pi - th));
}

}  // namespace

TEST(Martingale, ConstantIsValid) {
  auto m = SimpleMartingale::constant(on_circle(0.4));
  auto rep = validate(m, disk_lens(0.5));
  EXPECT_TRUE(rep.valid);
  EXPECT_EQ(m.leaf_count(), 1u);
  EXPECT_EQ(m.depth(), 0);
}

TEST(Martingale, TwoPointFromChord) {
  auto lens = disk_lens(0.5);
  auto m = two_point_martingale(lens, make_point(0, -0.75));
  ASSERT_TRUE(m);
  EXPECT_TRUE(validate(*m, lens).valid);
  ASSERT_EQ(m->root.children.size(), 2u);
  EXPECT_NEAR(m->root.children[0].mass, 0.5, 1e-9);
  EXPECT_NEAR(m->root.children[0].value[1], -0.75, 1e-12);
  EXPECT_NEAR(m->root.children[0].value[0], -m->root.children[1].value[0], 1e-9);

  auto on = two_point_martingale(lens, on_circle(2.0));
  ASSERT_TRUE(on);
  EXPECT_TRUE(on->root.leaf());
}

TEST(Martingale, StraddlingSplitIsInvalid) {
  auto lens = disk_lens(0.5);
  auto m = upper_split();
  EXPECT_TRUE(validate(m, lens).valid);
  auto bad = SimpleMartingale::two_point(make_point(0, 0), on_circle(0), 0.5, on_circle(std::numbers::pi));
  auto rep = validate(bad, lens);
  ASSERT_FALSE(rep.valid);
  ASSERT_FALSE(rep.issues.empty());
  EXPECT_LT(rep.min_clearance, 0.0);
}

TEST(Martingale, StructuralDefectsReported) {
  auto lens = disk_lens(0.5);
  auto m = upper_split();
  ASSERT_TRUE(validate(m, lens).valid);
  auto wrong_mass = m;
  wrong_mass.root.children[0].mass = 0.6;
  EXPECT_FALSE(validate(wrong_mass, lens).valid);
  auto off_boundary = m;
  off_boundary.root.children[0].value *= 0.9;
  EXPECT_FALSE(validate(off_boundary, lens).valid);
}

TEST(Martingale, ClosedVariantRejectsTangentChord) {
  auto lens = disk_lens(0.5);
  double w = std::sqrt(0.75);
  auto tangent = SimpleMartingale::two_point(make_point(0, -0.5), make_point(-w, -0.5), 0.5, make_point(w, -0.5));
  EXPECT_TRUE(validate(tangent, lens).valid);
  EXPECT_FALSE(validate(tangent, lens.with_closed_variant(true)).valid);
}

TEST(Martingale, PayoffExamples) {
  Point a = on_circle(0.3), b = on_circle(2.9);
  double alpha = 0.3;
  Point x = alpha * a + (1 - alpha) * b;
  auto m = SimpleMartingale::two_point(x, a, alpha, b);
  auto f = BoundaryFunction::exp_coordinate(0);
  EXPECT_NEAR(expected_payoff(m, f), alpha * f(a) + (1 - alpha) * f(b), 1e-15);
  EXPECT_EQ(expected_payoff(m, BoundaryFunction::zero()), 0.0);
  auto aff = BoundaryFunction::affine(make_point(-1, 3), 2);
  EXPECT_NEAR(expected_payoff(m, aff), aff(x), 1e-12);
}

TEST(Martingale, TerminalDistribution) {
  Point a = on_circle(0.3), b = on_circle(2.9);
  auto m = SimpleMartingale::two_point(0.25 * a + 0.75 * b, a, 0.25, b);
  auto d = terminal_distribution(m);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_NEAR(d.total_mass(), 1.0, 1e-15);
  EXPECT_TRUE(d.equals(AtomicMeasure({{a, 0.25}, {b, 0.75}}), 1e-15));

  // two leaves at the same point merge
  SimpleMartingale dup;
  dup.root.value = 0.5 * a + 0.5 * b;
  MartingaleNode left{0.5, 0.5 * a + 0.5 * b, {{0.5, a, {}}, {0.5, b, {}}}};
  dup.root.children = {left, {0.5, 0.5 * a + 0.5 * b, {{0.5, a, {}}, {0.5, b, {}}}}};
  auto dd = terminal_distribution(dup);
  EXPECT_EQ(dd.size(), 2u);
  EXPECT_LT((dd.barycenter() - dup.root.value).norm(), 1e-12);
}

TEST(Martingale, CheeseCentreHasNoTwoPointMartingale) {
  auto cheese = *canned_domain("cheese").lens;
  EXPECT_FALSE(two_point_martingale(cheese, make_point(0, 0)));
}

TEST(Martingale, RandomTwoPointMartingalesValidate) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-1, 1);
  for (const char* name : {"disk_in_disk", "sphere_bmo", "channel"}) {
    auto lens = *canned_domain(name).lens;
    auto f = BoundaryFunction::affine(make_point(0.3, -1.1), 0.2);
    int done = 0;
    while (done < 300) {
      Point x = make_point(U(rng), U(rng));
      if (!lens.contains(x)) continue;
      auto m = two_point_martingale(lens, x);
      ASSERT_TRUE(m) << name << " " << x.transpose();
      auto rep = validate(*m, lens);
      EXPECT_TRUE(rep.valid) << name << " " << x.transpose();
      EXPECT_LT((terminal_distribution(*m).barycenter() - x).norm(), 1e-10);
      EXPECT_NEAR(expected_payoff(*m, f), f(x), 1e-12);
      ++done;
    }
  }
}

TEST(Martingale, SubtreeIsValid) {
  auto lens = disk_lens(0.4);
  // root splits along a clear chord at y = -0.8, the left child splits again
  double w = std::sqrt(1 - 0.64);
  Point L = make_point(-w, -0.8), R = make_point(w, -0.8);
  Point mid = make_point(-0.2, -0.8);
  double t = (mid[0] + w) / (2 * w);
  SimpleMartingale m;
  m.root.value = make_point(0.1, -0.8);
  double s = (m.root.value[0] - mid[0]) / (w - mid[0]);
  MartingaleNode inner{1 - s, mid, {{1 - t, L, {}}, {t, R, {}}}};
  m.root.children = {inner, {s, R, {}}};
  ASSERT_TRUE(validate(m, lens).valid);
  auto sub = subtree(m, {0});
  EXPECT_NEAR(sub.root.mass, 1.0, 1e-15);
  EXPECT_LT((sub.start() - mid).norm(), 1e-15);
  EXPECT_TRUE(validate(sub, lens).valid);
}

TEST(AtomicMeasure, MergesAndCombines) {
  AtomicMeasure a({{make_point(1, 0), 0.5}, {make_point(1, 1e-12), 0.5}});
  EXPECT_EQ(a.size(), 1u);
  auto d = AtomicMeasure::delta(make_point(0, 1));
  auto c = a.combine(d, 0.25, 0.75);
  EXPECT_EQ(c.size(), 2u);
  EXPECT_NEAR(c.total_mass(), 1.0, 1e-15);
  EXPECT_LT((c.barycenter() - make_point(0.25, 0.75)).norm(), 1e-12);
}
