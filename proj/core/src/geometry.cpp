#include "lensbell/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lensbell {

std::vector<Point> sample_boundary(const ConvexBody& body, int n) {
  std::vector<Point> out;
  for (int k = 0; k < n; ++k) {
    auto p = body.boundary_point_dir(golden_direction(body.dimension(), k));
    if (p) out.push_back(*p);
  }
  return out;
}

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Point> boundary_samples(const ConvexBody& body, int n) { return sample_boundary(body, n); }

// Orthonormal basis of the orthogonal complement of a unit vector.
std::vector<Point> complement_basis(const Point& n) {
  const int d = static_cast<int>(n.size());
  std::vector<Point> basis;
  for (int i = 0; i < d && static_cast<int>(basis.size()) < d - 1; ++i) {
    Point e = Point::Zero(d);
    e[i] = 1.0;
    e -= e.dot(n) * n;
    for (const auto& b : basis) e -= e.dot(b) * b;
    if (e.norm() > 1e-8) basis.push_back(e.normalized());
  }
  return basis;
}
}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::heuristic_pass: return "heuristic-pass";
  }
  return "?";
}

LensDomain::LensDomain(ConvexBody outer, std::vector<ConvexBody> holes, bool closed_variant)
    : outer_(std::move(outer)), holes_(std::move(holes)), closed_(closed_variant) {
  if (holes_.empty()) throw GeometryError("lens needs at least one hole");
  for (const auto& h : holes_) {
    if (h.dimension() != outer_.dimension()) throw GeometryError("hole dimension does not match outer body");
    if (!outer_.strictly_inside(h.interior_point())) throw GeometryError("hole is not inside the outer body");
    for (const auto& p : boundary_samples(h, 64)) {
      if (!(outer_.signed_distance(p) < -outer_.boundary_tol())) {
        throw GeometryError("closure of the hole is not inside the outer body");
      }
    }
  }
}

LensDomain::LensDomain(ConvexBody outer, ConvexBody hole, bool closed_variant)
    : LensDomain(std::move(outer), std::vector<ConvexBody>{std::move(hole)}, closed_variant) {}

const ConvexBody& LensDomain::hole() const {
  if (holes_.size() != 1) throw GeometryError("operation needs a lens with exactly one hole");
  return holes_[0];
}

LensDomain LensDomain::with_closed_variant(bool closed) const {
  LensDomain l = *this;
  l.closed_ = closed;
  return l;
}

LensDomain LensDomain::with_holes(std::vector<ConvexBody> holes) const {
  return LensDomain(outer_, std::move(holes), closed_);
}

double LensDomain::tol() const { return outer_.boundary_tol(); }

bool LensDomain::contains(const Point& p) const {
  if (p.size() != dimension()) throw GeometryError("point dimension does not match lens");
  if (outer_.signed_distance(p) > outer_.boundary_tol()) return false;
  for (const auto& h : holes_) {
    double sd = h.signed_distance(p);
    if (closed_ ? !(sd > h.boundary_tol()) : sd < -h.boundary_tol()) return false;
  }
  return true;
}

bool LensDomain::on_fixed_boundary(const Point& p) const {
  return std::abs(outer_.signed_distance(p)) <= outer_.boundary_tol();
}

int LensDomain::free_boundary_hole(const Point& p) const {
  for (size_t i = 0; i < holes_.size(); ++i) {
    if (std::abs(holes_[i].signed_distance(p)) <= holes_[i].boundary_tol()) return static_cast<int>(i);
  }
  return -1;
}

double LensDomain::segment_hole_clearance(const Point& a, const Point& b) const {
  double best = kInf;
  for (const auto& h : holes_) best = std::min(best, segment_min_signed_distance(h, a, b).first);
  return best;
}

bool LensDomain::segment_inside(const Point& a, const Point& b) const {
  if (outer_.signed_distance(a) > outer_.boundary_tol()) return false;
  if (outer_.signed_distance(b) > outer_.boundary_tol()) return false;
  for (const auto& h : holes_) {
    double m = segment_min_signed_distance(h, a, b).first;
    if (closed_ ? !(m > h.boundary_tol()) : m < -h.boundary_tol()) return false;
  }
  return true;
}

double LensDomain::hull_hole_clearance(const std::vector<Point>& points) const {
  double best = kInf;
  for (const auto& h : holes_) best = std::min(best, hull_min_signed_distance(h, points));
  return best;
}

bool LensDomain::hull_clear(const std::vector<Point>& points) const {
  for (const auto& p : points) {
    if (outer_.signed_distance(p) > outer_.boundary_tol()) return false;
  }
  for (const auto& h : holes_) {
    double m = hull_min_signed_distance(h, points);
    if (closed_ ? !(m > h.boundary_tol()) : m < -h.boundary_tol()) return false;
  }
  return true;
}

Membership contains(const ConvexBody& body, const Point& p) { return body.contains(p); }

double distance_to(const ConvexBody& body, const Point& p) { return body.distance(p); }

SegmentClearance segment_clear(const Segment& seg, const ConvexBody& body) {
  auto [v, t] = segment_min_signed_distance(body, seg.a, seg.b);
  Point q = seg.at(t);
  double dist = v <= body.boundary_tol() ? 0.0 : v;
  return {dist > 0.0, dist, q};
}

ConvexBody minkowski_interpolate(const ConvexBody& b0, const ConvexBody& b1, double eps) {
  return ConvexBody::blend(b0, b1, eps);
}

std::optional<Segment> max_chord(const LensDomain& lens, const Point& x, const Point& dir) {
  if (!lens.contains(x)) throw GeometryError("chord base point is outside the lens");
  Point u = dir.normalized();
  auto li = lens.outer().line_interval(x, u);
  if (!li || !li->bounded()) return std::nullopt;
  Segment s{x + li->lo * u, x + li->hi * u};
  if (!lens.segment_inside(s.a, s.b)) return std::nullopt;
  return s;
}

Segment transversal_segment(const LensDomain& lens, const Point& x) {
  int h = lens.free_boundary_hole(x);
  if (h < 0) throw GeometryError("point is not on the free boundary");
  Point n = lens.holes()[h].normal(x);
  auto li = lens.outer().line_interval(x, n);
  if (!li || !std::isfinite(li->hi)) throw GeometryError("transversal does not reach the fixed boundary");
  double t_end = li->hi;
  for (size_t j = 0; j < lens.holes().size(); ++j) {
    if (static_cast<int>(j) == h) continue;
    auto lj = lens.holes()[j].line_interval(x, n);
    if (lj && lj->lo > 0.0 && lj->lo < t_end) t_end = lj->lo;
  }
  return {x, x + t_end * n};
}

VisibilitySample visibility_sample(const LensDomain& lens, const Point& x, int n_dirs, double range) {
  if (!lens.contains(x)) throw GeometryError("visibility base point is outside the lens");
  VisibilitySample out;
  const int d = lens.dimension();
  for (int k = 0; k < n_dirs; ++k) {
    Point u = golden_direction(d, k);
    auto li = lens.outer().line_interval(x, u);
    double t_max = range;
    if (li) t_max = std::min(t_max, std::max(0.0, li->hi));
    else t_max = 0.0;
    for (const auto& h : lens.holes()) {
      auto lh = h.line_interval(x, u);
      if (lh && lh->hi > 0.0) t_max = std::min(t_max, std::max(0.0, lh->lo));
    }
    if (t_max > lens.tol()) out.points.push_back(x + t_max * u);
  }
  double diam = 0.0;
  for (size_t i = 0; i < out.points.size(); ++i) {
    diam = std::max(diam, (out.points[i] - x).norm());
    for (size_t j = i + 1; j < out.points.size(); ++j) {
      diam = std::max(diam, (out.points[i] - out.points[j]).norm());
    }
  }
  out.diameter = diam;
  return out;
}

double delta(const LensDomain& lens, const std::vector<ConvexBody>& shrunk_holes, const Point& x,
             int n_samples) {
  if (lens.on_fixed_boundary(x)) throw GeometryError("splitting ratio is undefined on the fixed boundary");
  const int d = lens.dimension();
  double best = 1.0;
  for (const auto& s : shrunk_holes) {
    if (s.signed_distance(x) <= 0.0) throw GeometryError("point lies in the shrunk hole");
    for (int k = 0; k < n_samples; ++k) {
      auto z = s.boundary_point_dir(golden_direction(d, k));
      if (!z) continue;
      Point w = x - *z;
      double dz = w.norm();
      if (dz == 0.0) continue;
      Point u = w / dz;
      auto li = lens.outer().line_interval(x, u);
      if (!li) continue;
      if (!std::isfinite(li->hi)) return kInf;
      best = std::max(best, std::max(0.0, li->hi) / dz);
    }
  }
  return best;
}

double delta(const LensDomain& lens, const ConvexBody& shrunk_hole, const Point& x, int n_samples) {
  return delta(lens, std::vector<ConvexBody>{shrunk_hole}, x, n_samples);
}

namespace {

ConditionReport strict_convexity(const std::vector<std::pair<std::string, ConvexBody>>& bodies,
                                 int samples) {
  ConditionReport rep;
  rep.condition = "strict-convexity";
  const int per = std::clamp(samples, 8, 96);
  for (const auto& [name, body] : bodies) {
    auto pts = boundary_samples(body, per);
    double tol = body.boundary_tol();
    for (size_t i = 0; i < pts.size(); ++i) {
      for (size_t j = i + 1; j < pts.size(); ++j) {
        if ((pts[i] - pts[j]).norm() < 1e-6 * body.scale()) continue;
        Point m = 0.5 * (pts[i] + pts[j]);
        ++rep.samples;
        if (!(body.signed_distance(m) < -tol)) rep.witnesses.push_back(m);
      }
    }
  }
  rep.verdict = rep.witnesses.empty() ? Verdict::heuristic_pass : Verdict::fail;
  rep.note = "midpoints of sampled boundary chords must be interior";
  return rep;
}

ConditionReport cone_condition(const LensDomain& lens, int samples) {
  ConditionReport rep;
  rep.condition = "cone";
  if (lens.outer().bounded()) {
    rep.verdict = Verdict::pass;
    rep.note = "bounded outer body: condition is vacuous";
    return rep;
  }
  for (const auto& u : lens.outer().recession_sample(std::max(samples, 16))) {
    ++rep.samples;
    for (const auto& h : lens.holes()) {
      if (!h.is_recession_direction(u)) {
        rep.witnesses.push_back(u);
        break;
      }
    }
  }
  rep.verdict = rep.witnesses.empty() ? Verdict::heuristic_pass : Verdict::fail;
  rep.note = "sampled recession directions of the outer body must be recession directions of the hole";
  return rep;
}

}  // namespace

std::vector<ConditionReport> check_conditions(const LensDomain& lens, int samples) {
  std::vector<std::pair<std::string, ConvexBody>> bodies{{"outer", lens.outer()}};
  for (size_t i = 0; i < lens.holes().size(); ++i) bodies.push_back({"hole" + std::to_string(i), lens.holes()[i]});
  return {strict_convexity(bodies, samples), cone_condition(lens, samples)};
}

namespace {

std::vector<Point> section_boundary(const ConvexBody& body, const Hyperplane& plane, const Point& p,
                                    int n) {
  std::vector<Point> out;
  auto basis = complement_basis(plane.normal);
  if (basis.size() == 1) {
    auto li = body.line_interval(p, basis[0]);
    if (!li || !li->bounded()) throw GeometryError("section is unbounded");
    out.push_back(p + li->lo * basis[0]);
    out.push_back(p + li->hi * basis[0]);
    return out;
  }
  for (int k = 0; k < n; ++k) {
    Point c = golden_direction(static_cast<int>(basis.size()), k);
    Point u = Point::Zero(p.size());
    for (size_t i = 0; i < basis.size(); ++i) u += c[i] * basis[i];
    auto li = body.line_interval(p, u);
    if (!li || !std::isfinite(li->hi)) throw GeometryError("section is unbounded");
    out.push_back(p + li->hi * u);
  }
  return out;
}

}  // namespace

double slicing_constant(const ConvexBody& body, const Hyperplane& plane, const Point& p, double r,
                        double R) {
  if (!(r > 0.0 && R > 0.0)) throw GeometryError("slicing radii must be positive");
  double tol = body.boundary_tol();
  if (plane.distance(p) > tol) throw GeometryError("slicing center is not on the plane");
  if (body.signed_distance(p) > -r + tol) throw GeometryError("inner ball is not inside the body");
  for (const auto& z : section_boundary(body, plane, p, 256)) {
    if ((z - p).norm() > R + tol) throw GeometryError("section is not inside the outer ball");
  }
  return (r + R) / r;
}

SlicingReport verify_slicing(const ConvexBody& body, const Hyperplane& plane, const Point& p,
                             double r, double R, const std::vector<Point>& boundary_points) {
  SlicingReport rep;
  rep.constant = slicing_constant(body, plane, p, r, R);
  rep.worst_ratio = 0.0;
  rep.samples = 0;
  auto section = section_boundary(body, plane, p, 1024);
  double tol = 1e-9 * body.scale();
  if (section.size() > 2) tol = 2e-2 * body.scale() * std::sqrt(1.0 / section.size());
  for (const auto& y : boundary_points) {
    ++rep.samples;
    double best = kInf;
    for (const auto& z : section) best = std::min(best, (y - z).norm());
    double dist = plane.distance(y);
    if (dist > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, best / dist);
    if (best > rep.constant * dist + tol) rep.violations.push_back(y);
  }
  rep.passed = rep.violations.empty();
  return rep;
}

}  // namespace lensbell
