#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "lensbell/geometry.hpp"
#include "lensbell/scenarios.hpp"

using namespace lensbell;

namespace {

LensDomain disk_lens(double r) {
  return LensDomain(ConvexBody::ball(make_point(0, 0), 1.0), ConvexBody::ball(make_point(0, 0), r));
}

}  // namespace

TEST(Body, ContainsExamples) {
  auto disk = ConvexBody::ball(make_point(0, 0), 1.0);
  EXPECT_EQ(contains(disk, make_point(0, 0)), Membership::inside);
  EXPECT_EQ(contains(disk, make_point(1, 0)), Membership::boundary);
  EXPECT_EQ(contains(disk, make_point(1.5, 0)), Membership::outside);

  auto bmo_hole = ConvexBody::paraboloid(2, 1.0);
  EXPECT_EQ(contains(bmo_hole, make_point(0, 2)), Membership::inside);
  EXPECT_EQ(contains(bmo_hole, make_point(0, 0.5)), Membership::outside);

  // xy = 1 is the boundary of the open set
  auto a2 = ConvexBody::hyperbola(0.0, 1.0);
  EXPECT_FALSE(a2.strictly_inside(make_point(1, 1)));
  EXPECT_TRUE(a2.strictly_inside(make_point(2, 2)));
}

TEST(Body, DistanceExamples) {
  auto disk = ConvexBody::ball(make_point(0, 0), 1.0);
  EXPECT_NEAR(distance_to(disk, make_point(2, 0)), 1.0, 1e-12);
  EXPECT_EQ(distance_to(disk, make_point(0, 0)), 0.0);
}

TEST(Body, ParaboloidDistanceMatchesSampling) {
  auto hole = ConvexBody::paraboloid(2, 1.0);
  for (const auto& q : {make_point(0, 0), make_point(1.3, 0.2), make_point(-2, 1.5), make_point(0.4, -3)}) {
    double best = INFINITY;
    for (int k = -40000; k <= 40000; ++k) {
      double x = k * 1e-4;
      best = std::min(best, std::hypot(x - q[0], x * x + 1 - q[1]));
    }
    EXPECT_NEAR(distance_to(hole, q), best, 1e-6) << q.transpose();
  }
}

TEST(Body, HyperbolaSignedDistance) {
  auto h = ConvexBody::hyperbola(0.0, 1.0);
  // nearest boundary point of (2,2) is (1,1) by symmetry
  EXPECT_NEAR(h.signed_distance(make_point(2, 2)), -std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(h.signed_distance(make_point(0.5, 0.5)), std::sqrt(0.5), 1e-9);
}

TEST(Body, SupportOfBall) {
  auto b = ConvexBody::ball(make_point(1, 2), 0.5);
  EXPECT_NEAR(b.support(make_point(1, 0)), 1.5, 1e-12);
  EXPECT_NEAR(b.support(make_point(0, -1)), -1.5, 1e-12);
  EXPECT_TRUE(std::isinf(ConvexBody::paraboloid(2, 0).support(make_point(0, 1))));
}

TEST(Geometry, SegmentClearExamples) {
  auto small = ConvexBody::ball(make_point(0, 0), 0.5);
  auto through = segment_clear({make_point(-1, 0), make_point(1, 0)}, small);
  EXPECT_FALSE(through.clear);
  auto below = segment_clear({make_point(-1, -1), make_point(1, -1)}, small);
  EXPECT_TRUE(below.clear);
  EXPECT_NEAR(below.min_distance, 0.5, 1e-9);
  EXPECT_NEAR(below.closest[0], 0.0, 1e-6);
}

TEST(Geometry, ChannelSegmentIsClear) {
  auto lens = *canned_domain("channel").lens;
  ASSERT_EQ(lens.holes().size(), 2u);
  Point A = make_point(-1, 0), C = make_point(0, -1);
  for (const auto& h : lens.holes()) EXPECT_TRUE(segment_clear({A, C}, h).clear);
  EXPECT_TRUE(lens.segment_inside(A, C));
}

TEST(Geometry, MinkowskiInterpolate) {
  auto b0 = ConvexBody::ball(make_point(0, 0), 1.0);
  auto b1 = ConvexBody::ball(make_point(0, 0), 0.5);
  EXPECT_EQ(minkowski_interpolate(b0, b1, 0.0).kind(), b0.kind());
  EXPECT_NEAR(minkowski_interpolate(b0, b1, 0.0).signed_distance(make_point(0.7, 0)), -0.3, 1e-12);
  EXPECT_NEAR(minkowski_interpolate(b0, b1, 1.0).signed_distance(make_point(0.7, 0)), 0.2, 1e-12);
  auto mid = minkowski_interpolate(b0, b1, 0.5);
  for (double th : {0.0, 1.0, 2.5, 4.0}) {
    EXPECT_NEAR(mid.signed_distance(make_point(std::cos(th), std::sin(th))), 0.25, 1e-6);
  }
}

TEST(Geometry, BlendOfDifferentBodies) {
  // support functions add under Minkowski combination
  auto b0 = ConvexBody::ball(make_point(0, 0), 1.0);
  auto b1 = ConvexBody::ellipsoid(make_point(0.2, 0), make_point(0.4, 0.2));
  auto mid = minkowski_interpolate(b0, b1, 0.3);
  for (const auto& u : golden_directions(2, 16)) {
    EXPECT_NEAR(mid.support(u), 0.7 * b0.support(u) + 0.3 * b1.support(u), 1e-6);
  }
}

TEST(Geometry, MaxChordExamples) {
  auto lens = disk_lens(0.5);
  auto c = max_chord(lens, make_point(0, -0.75), make_point(1, 0));
  ASSERT_TRUE(c);
  double w = std::sqrt(1 - 0.5625);
  EXPECT_NEAR(std::min(c->a[0], c->b[0]), -w, 1e-9);
  EXPECT_NEAR(std::max(c->a[0], c->b[0]), w, 1e-9);
  EXPECT_NEAR(c->a[1], -0.75, 1e-12);
  EXPECT_FALSE(max_chord(lens, make_point(0, -0.6), make_point(0, 1)));
}

TEST(Geometry, MaxChordTangentOnSphereBmo) {
  auto lens = *canned_domain("sphere_bmo").lens;
  double r = std::sqrt(0.75);
  Point x = make_point(r * std::cos(0.7), r * std::sin(0.7));
  Point tangent = make_point(-std::sin(0.7), std::cos(0.7));
  auto c = max_chord(lens, x, tangent);
  ASSERT_TRUE(c);
  EXPECT_NEAR(c->a.norm(), 1.0, 1e-9);
  EXPECT_NEAR(c->b.norm(), 1.0, 1e-9);
}

TEST(Geometry, TransversalSegments) {
  auto s = transversal_segment(disk_lens(0.5), make_point(0, -0.5));
  EXPECT_NEAR((s.a - make_point(0, -0.5)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((s.b - make_point(0, -1)).norm(), 0.0, 1e-9);

  auto sphere = *canned_domain("sphere_bmo").lens;
  auto t = transversal_segment(sphere, make_point(0, -std::sqrt(0.75)));
  EXPECT_NEAR((t.b - make_point(0, -1)).norm(), 0.0, 1e-9);

  EXPECT_THROW(transversal_segment(disk_lens(0.5), make_point(0, -0.7)), GeometryError);
}

TEST(Geometry, ChannelTransversalDropsVertically) {
  auto lens = *canned_domain("channel").lens;
  const auto& left = lens.holes()[0];
  auto low = left.boundary_point(-std::numbers::pi / 2);
  ASSERT_TRUE(low);
  auto s = transversal_segment(lens, *low);
  EXPECT_NEAR(s.b[0], (*low)[0], 1e-6);
  EXPECT_NEAR(s.b.norm(), 1.0, 1e-9);
}

TEST(Geometry, VisibilityStaysInLens) {
  auto lens = disk_lens(0.4);
  Point x = make_point(0, -0.7);
  auto vis = visibility_sample(lens, x, 128, 10.0);
  ASSERT_FALSE(vis.points.empty());
  for (const auto& p : vis.points) {
    EXPECT_TRUE(lens.contains(p));
    EXPECT_GT(lens.segment_hole_clearance(x, p), -1e-9);
  }
  EXPECT_LE(vis.diameter, 2.0 + 1e-9);
  EXPECT_GT(vis.diameter, 1.0);
}

TEST(Geometry, VisibilityWithoutOcclusionReachesOuter) {
  // the hole sits behind the query point for every direction sampled
  LensDomain lens(ConvexBody::ball(make_point(0, 0), 1.0), ConvexBody::ball(make_point(0.85, 0), 0.05));
  auto vis = visibility_sample(lens, make_point(-0.9, 0), 16, 10.0);
  int on_outer = 0;
  for (const auto& p : vis.points) on_outer += lens.on_fixed_boundary(p);
  EXPECT_GE(on_outer, 15);
}

TEST(Geometry, DeltaIsFiniteOnSphereBmo) {
  auto lens = *canned_domain("sphere_bmo").lens;
  auto shrunk = ConvexBody::homothety(lens.hole(), make_point(0, 0), 0.9);
  double d = delta(lens, shrunk, make_point(0, -0.93));
  EXPECT_GE(d, 1.0);
  EXPECT_TRUE(std::isfinite(d));
}

TEST(Geometry, ConditionsOnCannedDomains) {
  for (const char* name : {"disk_in_disk", "hyperbola_pair", "sphere_bmo"}) {
    for (const auto& r : check_conditions(*canned_domain(name).lens, 128)) {
      EXPECT_NE(r.verdict, Verdict::fail) << name << " " << r.condition;
    }
  }
  bool failed = false;
  for (const auto& r : check_conditions(*canned_domain("cone_fail").lens, 128)) {
    if (r.verdict == Verdict::fail) {
      failed = true;
      EXPECT_FALSE(r.witnesses.empty());
    }
  }
  EXPECT_TRUE(failed);
}

TEST(Geometry, LensRejectsHoleTouchingOuter) {
  EXPECT_THROW(LensDomain(ConvexBody::ball(make_point(0, 0), 1.0), ConvexBody::ball(make_point(0.5, 0), 0.6)),
               GeometryError);
}

TEST(Geometry, SampleBoundaryOfBall) {
  auto pts = sample_boundary(ConvexBody::ball(make_point(0.3, -0.1), 2.0), 64);
  ASSERT_EQ(pts.size(), 64u);
  for (const auto& p : pts) EXPECT_NEAR((p - make_point(0.3, -0.1)).norm(), 2.0, 1e-9);
}

TEST(Geometry, GoldenDirectionsAreNested) {
  auto a = golden_directions(3, 10), b = golden_directions(3, 20);
  for (int k = 0; k < 10; ++k) EXPECT_EQ((a[k] - b[k]).norm(), 0.0);
  for (const auto& u : b) EXPECT_NEAR(u.norm(), 1.0, 1e-12);
}
