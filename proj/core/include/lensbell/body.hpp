#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lensbell {

using Point = Eigen::VectorXd;

Point make_point(double x, double y);
Point make_point(double x, double y, double z);

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Membership { inside, boundary, outside };

const char* to_string(Membership m);

enum class BodyKind {
  ball,
  ellipsoid,
  paraboloid,   // y > |x|^2 + offset, y = last coordinate
  hyperbola,    // (x - s)(y - s) > level with x, y > s; planar
  hyperboloid,  // y > sqrt(|x|^2 + a^2), y = last coordinate
  homothety,    // center + factor * (body - center)
  inflation,    // body + margin * unit ball
  blend,        // (1 - eps) * first + eps * second
};

const char* to_string(BodyKind k);

// Open interval of line parameters; endpoints may be infinite.
struct LineInterval {
  double lo;
  double hi;
  bool bounded() const;
  bool contains(double t) const { return lo < t && t < hi; }
};

// Immutable open convex set described by a canonical descriptor. Every
// query is answered from closed forms where they exist and from the support
// function otherwise.
class ConvexBody {
 public:
  static ConvexBody ball(Point center, double radius);
  static ConvexBody ellipsoid(Point center, Point semi_axes);
  static ConvexBody paraboloid(int dim, double offset);
  static ConvexBody hyperbola(double shift, double level);
  static ConvexBody hyperboloid(int dim, double a);
  static ConvexBody homothety(const ConvexBody& body, Point center, double factor);
  static ConvexBody inflation(const ConvexBody& body, double margin);
  // Minkowski combination; eps = 0 and eps = 1 return the inputs unchanged.
  static ConvexBody blend(const ConvexBody& first, const ConvexBody& second, double eps);

  int dimension() const;
  BodyKind kind() const;
  bool bounded() const;

  // Length scale used for relative tolerances.
  double scale() const;
  double boundary_tol() const { return 1e-9 * scale(); }

  // Negative inside, positive outside, magnitude is the Euclidean distance
  // to the boundary.
  double signed_distance(const Point& p) const;
  // Distance to the closure; zero on inside and boundary-tol points.
  double distance(const Point& p) const;
  Membership contains(const Point& p) const;
  bool strictly_inside(const Point& p) const { return contains(p) == Membership::inside; }

  // sup over the body of <u, y>; +inf when unbounded in that direction.
  double support(const Point& u) const;

  // Parameters t with origin + t * dir in the open body.
  std::optional<LineInterval> line_interval(const Point& origin, const Point& dir) const;

  Point interior_point() const;
  // Outward unit normal at a boundary point (gradient of the distance).
  Point normal(const Point& boundary_point) const;
  // 2D: point where the ray from interior_point() at the given angle exits.
  std::optional<Point> boundary_point(double angle) const;
  // Exit point of the ray from interior_point() in direction u (any d).
  std::optional<Point> boundary_point_dir(const Point& u) const;

  bool is_recession_direction(const Point& u) const;
  std::vector<Point> recession_sample(int n) const;

  // Closed-form parameters, exposed for serialization.
  const Point& center() const;
  const Point& vec() const;
  double p0() const;
  double p1() const;
  const std::vector<ConvexBody>& children() const;

  std::string describe() const;

 private:
  struct Data;
  explicit ConvexBody(std::shared_ptr<const Data> d);
  double generic_signed_distance(const Point& p) const;
  std::shared_ptr<const Data> d_;
};

// Minimum of the signed distance along [a, b]; returns value and parameter.
std::pair<double, double> segment_min_signed_distance(const ConvexBody& body, const Point& a,
                                                      const Point& b);

// Minimum of the signed distance over the triangle conv{a, b, c}.
double triangle_min_signed_distance(const ConvexBody& body, const Point& a, const Point& b,
                                    const Point& c, Point* argmin = nullptr);

// Minimum of the signed distance over conv(points). Exact in 2D; in higher
// dimension faces are checked and hull interior containment of a body point
// is detected, so the sign is always right.
double hull_min_signed_distance(const ConvexBody& body, const std::vector<Point>& points,
                                Point* argmin = nullptr);

// Nested deterministic unit direction sequence (golden angle in 2D, an
// additive recurrence mapped to the sphere in 3D): the first n directions
// of a longer sequence are the shorter sequence.
Point golden_direction(int dim, int k);
std::vector<Point> golden_directions(int dim, int n);

}  // namespace lensbell
