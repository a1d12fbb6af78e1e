#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lensbell/scenarios.hpp"
#include "lensbell/splitting.hpp"

using namespace lensbell;

namespace {

LensDomain disk_lens(double r) {
  return LensDomain(ConvexBody::ball(make_point(0, 0), 1.0), ConvexBody::ball(make_point(0, 0), r));
}

Point on_circle(double th) { return make_point(std::cos(th), std::sin(th)); }

}  // namespace

TEST(SplitConfig, Validation) {
  SplitConfig c;
  EXPECT_NO_THROW(c.validate(4));
  c.shrink = 1.0;
  EXPECT_ANY_THROW(c.validate(4));
  c = {};
  c.resolution = 8;
  EXPECT_ANY_THROW(c.validate(4));
  c = {};
  c.max_depth = 2;
  EXPECT_ANY_THROW(c.validate(9));
}

TEST(SplitInterval, TwoPiecesSplitAtBreakpoint) {
  auto lens = disk_lens(0.5);
  double w = std::sqrt(1 - 0.5625);
  StepFunction phi(Carrier::interval, {0.0, 0.4}, {make_point(-w, -0.75), make_point(w, -0.75)});
  auto shrunk = shrink_holes(lens, 0.9);
  auto c = split_interval(phi, 0, 1, shrunk, 10.0, SplitConfig{});
  EXPECT_DOUBLE_EQ(c.t, 0.4);
  EXPECT_NEAR(c.ratio, 1.5, 1e-12);
  EXPECT_GT(c.margin, 0.0);
}

TEST(SplitInterval, ConstantHasRatioOne) {
  auto lens = disk_lens(0.5);
  auto phi = StepFunction::constant(Carrier::interval, on_circle(1));
  auto c = split_interval(phi, 0.2, 0.7, shrink_holes(lens, 0.9), 1.0, SplitConfig{});
  EXPECT_EQ(c.ratio, 1.0);
  EXPECT_GT(c.t, 0.2);
  EXPECT_LT(c.t, 0.7);
}

TEST(BuildMartingale, TwoPieceGivesTwoPointMartingale) {
  auto lens = disk_lens(0.5);
  double w = std::sqrt(1 - 0.5625);
  StepFunction phi(Carrier::interval, {0.0, 0.5}, {make_point(-w, -0.75), make_point(w, -0.75)});
  auto res = build_martingale(phi, lens, SplitConfig{}, BoundaryFunction::exp_coordinate(0));
  ASSERT_EQ(res.martingale.root.children.size(), 2u);
  EXPECT_EQ(res.martingale.leaf_count(), 2u);
  EXPECT_TRUE(validate(res.martingale, res.extended).valid);
  EXPECT_NEAR(res.martingale.root.children[0].mass, 0.5, 1e-15);
  EXPECT_NEAR(res.expected, res.payoff, 1e-12);
}

TEST(BuildMartingale, ConstantIsLeaf) {
  auto res = build_martingale(StepFunction::constant(Carrier::interval, on_circle(0.3)), disk_lens(0.5),
                              SplitConfig{}, BoundaryFunction::zero());
  EXPECT_TRUE(res.martingale.root.leaf());
  EXPECT_TRUE(res.trace.empty());
}

TEST(BuildMartingale, ChannelFunction) {
  auto lens = *canned_domain("channel").lens;
  auto phi = channel_function();
  auto res = build_martingale(phi, lens, SplitConfig{}, BoundaryFunction::channel());
  EXPECT_TRUE(validate(res.martingale, res.extended).valid);
  EXPECT_EQ(res.expected, 0.0);
  EXPECT_EQ(res.payoff, 0.0);
  EXPECT_TRUE(terminal_distribution(res.martingale).equals(distribution(phi), 1e-12));
  EXPECT_GE(res.martingale.leaf_count(), 3u);
  for (const auto& t : res.trace) EXPECT_LE(t.ratio, t.bound * 1.05);
}

TEST(BuildMartingale, RejectsInadmissible) {
  StepFunction phi(Carrier::interval, {0.0, 0.5}, {on_circle(0), on_circle(std::numbers::pi)});
  EXPECT_THROW(build_martingale(phi, disk_lens(0.5), SplitConfig{}, BoundaryFunction::zero()), ClassError);
}

TEST(BuildMartingale, ExtendedLensUsesShrunkClosedHoles) {
  auto lens = disk_lens(0.5);
  double w = std::sqrt(1 - 0.5625);
  StepFunction phi(Carrier::interval, {0.0, 0.5}, {make_point(-w, -0.75), make_point(w, -0.75)});
  auto res = build_martingale(phi, lens, SplitConfig{}, BoundaryFunction::zero());
  EXPECT_TRUE(res.extended.closed_variant());
  EXPECT_NEAR(res.extended.hole().signed_distance(make_point(0.45, 0)), 0.0, 1e-9);
}

TEST(BuildMartingale, RandomSphereBmoFunctions) {
  auto lens = *canned_domain("sphere_bmo").lens;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(0, 1);
  auto f = BoundaryFunction::exp_coordinate(0);
  int done = 0, attempts = 0;
  while (done < 20 && attempts < 5000) {
    ++attempts;
    int n = 4 + static_cast<int>(rng() % 3);
    double c = 2 * std::numbers::pi * U(rng), width = 0.3 + 1.2 * U(rng);
    std::vector<double> br{0.0};
    for (int i = 1; i < n; ++i) br.push_back(U(rng));
    std::sort(br.begin(), br.end());
    std::vector<Point> v;
    for (int i = 0; i < n; ++i) v.push_back(on_circle(c + width * (U(rng) - 0.5)));
    StepFunction phi(Carrier::interval, br, v);
    if (interval_membership(phi, lens).verdict != MembershipVerdict::member) continue;
    auto res = build_martingale(phi, lens, SplitConfig{}, f);
    EXPECT_TRUE(validate(res.martingale, res.extended).valid);
    EXPECT_TRUE(terminal_distribution(res.martingale).equals(distribution(phi), 1e-12));
    EXPECT_NEAR(res.expected, res.payoff, 1e-9);
    for (const auto& t : res.trace) EXPECT_LE(t.ratio, t.bound * 1.05);
    ++done;
  }
  EXPECT_EQ(done, 20);
}
