#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lensbell/geometry.hpp"

namespace lensbell {

enum class Carrier { interval, circle };

const char* to_string(Carrier c);

class ClassError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Piecewise constant map on [0,1] or on the unit-length circle. Piece k is
// [breakpoints[k], breakpoints[k+1]) with the last piece ending at 1.
class StepFunction {
 public:
  StepFunction(Carrier carrier, std::vector<double> breakpoints, std::vector<Point> values);
  static StepFunction constant(Carrier carrier, Point value);

  Carrier carrier() const { return carrier_; }
  size_t pieces() const { return values_.size(); }
  int dimension() const { return static_cast<int>(values_[0].size()); }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<Point>& values() const { return values_; }
  double start(size_t k) const { return breaks_[k]; }
  double end(size_t k) const { return k + 1 < breaks_.size() ? breaks_[k + 1] : 1.0; }
  double length(size_t k) const { return end(k) - start(k); }

  Point mean() const;
  // Integral of the function over [0, t]; periodic extension on the circle.
  Point primitive(double t) const;
  size_t piece_at(double t) const;

  // Circle only: the function t -> phi(t + shift).
  StepFunction rotated(double shift) const;
  // Same function with adjacent equal values merged.
  StepFunction merged(double tol = 1e-12) const;
  StepFunction with_carrier(Carrier c) const;

  // Throws ClassError when a value is off the fixed boundary.
  void validate_on(const ConvexBody& outer) const;

 private:
  Carrier carrier_;
  std::vector<double> breaks_;
  std::vector<Point> values_;
};

enum class Regularity { bounded_below, lipschitz, c2, indicator };

struct BoundaryFunction {
  std::string kind;
  std::vector<double> params;
  std::function<double(const Point&)> eval;
  std::vector<Regularity> tags;
  std::optional<double> lower_bound;
  // Lipschitz constant on the unit ball when known.
  std::optional<double> lipschitz;

  double operator()(const Point& p) const { return eval(p); }
  bool has(Regularity r) const;

  static BoundaryFunction zero();
  static BoundaryFunction affine(Point coeffs, double constant);
  // exp(scale * x_k)
  static BoundaryFunction exp_coordinate(int k, double scale = 1.0);
  // 1 when x_k >= threshold, else 0
  static BoundaryFunction indicator_coordinate(int k, double threshold);
  // |x_k|^power
  static BoundaryFunction power_coordinate(int k, double power);
  // 0 below the horizontal axis, -x_2 above it
  static BoundaryFunction channel();
  // cos(m * angle) of a planar point about the origin
  static BoundaryFunction cos_angle(int m);
};

enum class MembershipVerdict { member, violated, inconclusive };

const char* to_string(MembershipVerdict v);

struct MembershipOptions {
  double margin_tol = 1e-7;
  bool stop_at_first_violation = false;
  int max_windings = 10000;
};

struct MembershipReport {
  MembershipVerdict verdict = MembershipVerdict::member;
  // Smallest signed distance of any checked average to the forbidden set.
  double margin = 0.0;
  std::optional<std::pair<double, double>> witness;
  std::optional<Point> witness_average;
  int polygons_checked = 0;
  int windings_checked = 0;
  std::string note;
};

Point average(const StepFunction& phi, double a, double b);

MembershipReport interval_membership(const StepFunction& phi, const LensDomain& lens,
                                     const MembershipOptions& opts = {});

MembershipReport circle_membership(const StepFunction& phi, const LensDomain& lens,
                                   const std::vector<ConvexBody>& hat_holes,
                                   const MembershipOptions& opts = {});
MembershipReport circle_membership(const StepFunction& phi, const LensDomain& lens,
                                   const ConvexBody& hat_hole, const MembershipOptions& opts = {});

// A chord through x, clear of the holes in the sense of the lens variant.
std::optional<Segment> find_clear_chord(const LensDomain& lens, const Point& x, int fan = 720);

std::optional<StepFunction> two_point_function(const LensDomain& lens, const Point& x);

double payoff(const StepFunction& phi, const BoundaryFunction& f);

enum class EmbeddingKind { a2, bmo, sphere };

StepFunction canonical_embedding(EmbeddingKind kind, std::vector<double> breakpoints,
                                 const std::vector<Point>& data, Carrier carrier = Carrier::interval);

}  // namespace lensbell
