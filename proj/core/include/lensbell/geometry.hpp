#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lensbell/body.hpp"

namespace lensbell {

struct Segment {
  Point a;
  Point b;
  double length() const { return (b - a).norm(); }
  Point at(double t) const { return a + t * (b - a); }
  bool degenerate() const { return length() == 0.0; }
};

enum class Verdict { pass, fail, heuristic_pass };

const char* to_string(Verdict v);

struct ConditionReport {
  std::string condition;
  Verdict verdict = Verdict::pass;
  std::vector<Point> witnesses;
  int samples = 0;
  std::string note;
};

// cl(outer) minus the holes. With closed_variant the holes are removed
// together with their boundaries.
class LensDomain {
 public:
  LensDomain(ConvexBody outer, std::vector<ConvexBody> holes, bool closed_variant = false);
  LensDomain(ConvexBody outer, ConvexBody hole, bool closed_variant = false);

  const ConvexBody& outer() const { return outer_; }
  const std::vector<ConvexBody>& holes() const { return holes_; }
  // The unique hole; throws when there are several.
  const ConvexBody& hole() const;
  bool closed_variant() const { return closed_; }
  int dimension() const { return outer_.dimension(); }
  LensDomain with_closed_variant(bool closed) const;
  LensDomain with_holes(std::vector<ConvexBody> holes) const;

  double tol() const;

  bool contains(const Point& p) const;
  bool on_fixed_boundary(const Point& p) const;
  // Index of the hole whose boundary holds p, or -1.
  int free_boundary_hole(const Point& p) const;
  bool on_free_boundary(const Point& p) const { return free_boundary_hole(p) >= 0; }

  // Smallest signed distance from the segment to any hole.
  double segment_hole_clearance(const Point& a, const Point& b) const;
  // Segment inside the lens: endpoints in cl(outer), holes avoided in the
  // sense of the variant.
  bool segment_inside(const Point& a, const Point& b) const;
  // Minimum hole clearance of conv(points), negative when a hole is entered.
  double hull_hole_clearance(const std::vector<Point>& points) const;
  bool hull_clear(const std::vector<Point>& points) const;

  std::vector<ConditionReport> checked;

 private:
  ConvexBody outer_;
  std::vector<ConvexBody> holes_;
  bool closed_;
};

struct SegmentClearance {
  bool clear;
  double min_distance;
  Point closest;
};

Membership contains(const ConvexBody& body, const Point& p);
double distance_to(const ConvexBody& body, const Point& p);
SegmentClearance segment_clear(const Segment& seg, const ConvexBody& body);
ConvexBody minkowski_interpolate(const ConvexBody& b0, const ConvexBody& b1, double eps);

// Maximal chord through x along dir with both ends on the fixed boundary.
std::optional<Segment> max_chord(const LensDomain& lens, const Point& x, const Point& dir);

// Segment from a free-boundary point x along the outward hole normal, up to
// the fixed boundary or the first other hole.
Segment transversal_segment(const LensDomain& lens, const Point& x);

struct VisibilitySample {
  std::vector<Point> points;
  double diameter = 0.0;
};

VisibilitySample visibility_sample(const LensDomain& lens, const Point& x, int n_dirs,
                                   double range);

// Sampled splitting ratio bound at x against the given shrunk holes.
double delta(const LensDomain& lens, const std::vector<ConvexBody>& shrunk_holes, const Point& x,
             int n_samples = 512);
double delta(const LensDomain& lens, const ConvexBody& shrunk_hole, const Point& x,
             int n_samples = 512);

// Strict convexity and cone condition, as sampled heuristics.
std::vector<ConditionReport> check_conditions(const LensDomain& lens, int samples);

struct Hyperplane {
  Point normal;  // unit
  double offset; // normal . x = offset
  double distance(const Point& p) const { return std::abs(normal.dot(p) - offset); }
};

struct SlicingReport {
  double constant;
  bool passed;
  double worst_ratio;
  int samples;
  std::vector<Point> violations;
};

double slicing_constant(const ConvexBody& body, const Hyperplane& plane, const Point& p, double r,
                        double R);
SlicingReport verify_slicing(const ConvexBody& body, const Hyperplane& plane, const Point& p,
                             double r, double R, const std::vector<Point>& boundary_points);

// Boundary points hit by rays from the interior point along the nested
// direction sequence; rays that never exit are skipped.
std::vector<Point> sample_boundary(const ConvexBody& body, int n);

}  // namespace lensbell
