#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "lensbell/gluing.hpp"

using namespace lensbell;

namespace {

LensDomain disk_lens(double r) {
  return LensDomain(ConvexBody::ball(make_point(0, 0), 1.0), ConvexBody::ball(make_point(0, 0), r));
}

Point on_circle(double th) { return make_point(std::cos(th), std::sin(th)); }

// root on the chord y = -0.8, left child split again along the same chord
SimpleMartingale depth_two() {
  double w = std::sqrt(1 - 0.64);
  Point L = make_point(-w, -0.8), R = make_point(w, -0.8), mid = make_point(-0.2, -0.8);
  double t = (mid[0] + w) / (2 * w);
  SimpleMartingale m;
  m.root.value = make_point(0.1, -0.8);
  double s = (m.root.value[0] - mid[0]) / (w - mid[0]);
  m.root.children = {{1 - s, mid, {{1 - t, L, {}}, {t, R, {}}}}, {s, R, {}}};
  return m;
}

void expect_node_identity(const MeasureNode& node, const SimpleMartingale& m, std::vector<size_t> path) {
  EXPECT_TRUE(node.measure.equals(terminal_distribution(subtree(m, path)), 1e-12));
  for (size_t k = 0; k < node.children.size(); ++k) {
    auto p = path;
    p.push_back(k);
    expect_node_identity(node.children[k], m, p);
  }
}

}  // namespace

TEST(Lift, TwoPoint) {
  Point a = on_circle(-0.4), b = on_circle(-2.7);
  auto m = SimpleMartingale::two_point(0.3 * a + 0.7 * b, a, 0.3, b);
  auto mm = lift_to_measures(m);
  EXPECT_TRUE(mm.root.measure.equals(AtomicMeasure({{a, 0.3}, {b, 0.7}}), 1e-15));
  ASSERT_EQ(mm.root.children.size(), 2u);
  EXPECT_EQ(mm.root.children[0].measure.size(), 1u);
  EXPECT_EQ(mm.root.children[1].measure.size(), 1u);
}

TEST(Lift, Constant) {
  auto mm = lift_to_measures(SimpleMartingale::constant(on_circle(1)));
  EXPECT_EQ(mm.root.measure.size(), 1u);
  EXPECT_TRUE(mm.root.leaf());
}

TEST(Lift, DepthTwoMatchesAggregation) {
  auto m = depth_two();
  ASSERT_TRUE(validate(m, disk_lens(0.4)).valid);
  auto mm = lift_to_measures(m);
  expect_node_identity(mm.root, m, {});
  EXPECT_TRUE(mm.root.measure.equals(terminal_distribution(m), 1e-12));
}

TEST(HatHole, MarginBelowChordDistance) {
  auto lens = disk_lens(0.5);
  auto m = two_point_martingale(lens, make_point(0, -0.75));
  ASSERT_TRUE(m);
  auto hat = choose_hat_hole(*m, lens);
  EXPECT_LT(hat.eps, 1.0);
  EXPECT_GT(hat.eps, hat.critical_eps);
  EXPECT_GT(hat.margin, 0.0);
  EXPECT_LE(hat.margin, 0.25 + 1e-9);
  ASSERT_EQ(hat.bodies.size(), 1u);
  // the chosen body contains the closed hole
  for (double th = 0; th < 6.28; th += 0.3) EXPECT_TRUE(hat.bodies[0].strictly_inside(0.5 * on_circle(th)));
}

TEST(HatHole, TouchingHullFails) {
  auto lens = disk_lens(0.5);
  double w = std::sqrt(0.75);
  auto tangent = SimpleMartingale::two_point(make_point(0, -0.5), make_point(-w, -0.5), 0.5, make_point(w, -0.5));
  EXPECT_THROW(choose_hat_hole(tangent, lens), GluingError);
}

TEST(ValidateLift, PassesAndFails) {
  auto lens = disk_lens(0.5);
  auto m = two_point_martingale(lens, make_point(0, -0.75));
  ASSERT_TRUE(m);
  auto mm = lift_to_measures(*m);
  EXPECT_TRUE(validate_lift(mm, ConvexBody::ball(make_point(0, 0), 0.6)).valid);
  auto rep = validate_lift(mm, ConvexBody::ball(make_point(0, 0), 0.8));
  EXPECT_FALSE(rep.valid);
  EXPECT_FALSE(rep.issues.empty());
  // delta leaves alone never fail
  EXPECT_TRUE(validate_lift(lift_to_measures(SimpleMartingale::constant(on_circle(2))),
                            ConvexBody::ball(make_point(0, 0), 0.8))
                  .valid);
}

TEST(Realize, TwoPoint) {
  auto lens = disk_lens(0.5);
  auto m = two_point_martingale(lens, make_point(0.2, -0.7));
  ASSERT_TRUE(m);
  auto rep = realize_on_circle(*m, lens);
  ASSERT_TRUE(rep.found) << rep.note;
  ASSERT_TRUE(rep.function);
  EXPECT_EQ(rep.function->carrier(), Carrier::circle);
  EXPECT_EQ(rep.verifier.verdict, MembershipVerdict::member);
  EXPECT_TRUE(distribution(*rep.function).equals(terminal_distribution(*m), 1e-12));
  auto f = BoundaryFunction::cos_angle(3);
  EXPECT_NEAR(payoff(*rep.function, f), expected_payoff(*m, f), 1e-12);
}

TEST(Realize, Constant) {
  auto rep = realize_on_circle(SimpleMartingale::constant(on_circle(0.7)), disk_lens(0.5));
  ASSERT_TRUE(rep.found);
  EXPECT_EQ(rep.function->pieces(), 1u);
}

TEST(Realize, DepthTwo) {
  auto m = depth_two();
  auto rep = realize_on_circle(m, disk_lens(0.4));
  ASSERT_TRUE(rep.found) << rep.note;
  EXPECT_TRUE(distribution(*rep.function).equals(terminal_distribution(m), 1e-12));
}

TEST(Realize, SplitAtomNeeded) {
  // the segment from B to C crosses the hole and the other two pairs are
  // clear, so no order with one arc per atom closes up; A B A C does
  auto lens = disk_lens(0.4);
  Point A = on_circle(-0.9474), B = on_circle(-2.4694), C = on_circle(0.9462);
  const double wa = 0.9417, wy = 0.8755;
  Point y = wa * A + (1 - wa) * B;
  SimpleMartingale m;
  m.root.value = wy * y + (1 - wy) * C;
  m.root.children = {{wy, y, {{wa, A, {}}, {1 - wa, B, {}}}}, {1 - wy, C, {}}};
  ASSERT_TRUE(validate(m, lens.with_closed_variant(true)).valid);

  GlueBudget single;
  single.extra_arcs = 0;
  auto flat = realize_on_circle(m, lens, single);
  EXPECT_FALSE(flat.found);
  EXPECT_FALSE(flat.note.empty());

  auto rep = realize_on_circle(m, lens);
  ASSERT_TRUE(rep.found) << rep.note;
  EXPECT_EQ(rep.function->pieces(), 4u);
  EXPECT_TRUE(distribution(*rep.function).equals(terminal_distribution(m), 1e-12));
  auto f = BoundaryFunction::exp_coordinate(1);
  EXPECT_NEAR(payoff(*rep.function, f), expected_payoff(m, f), 1e-9);
}
