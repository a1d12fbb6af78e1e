#include "lensbell/classes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lensbell {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(Carrier c) { return c == Carrier::interval ? "interval" : "circle"; }

const char* to_string(MembershipVerdict v) {
  switch (v) {
    case MembershipVerdict::member: return "member";
    case MembershipVerdict::violated: return "violated";
    case MembershipVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

StepFunction::StepFunction(Carrier carrier, std::vector<double> breakpoints, std::vector<Point> values)
    : carrier_(carrier), breaks_(std::move(breakpoints)), values_(std::move(values)) {
  if (values_.empty()) throw ClassError("step function needs at least one piece");
  if (breaks_.size() != values_.size()) throw ClassError("one breakpoint per piece is required");
  if (breaks_[0] != 0.0) throw ClassError("first breakpoint must be 0");
  for (size_t k = 1; k < breaks_.size(); ++k) {
    if (!(breaks_[k] > breaks_[k - 1])) throw ClassError("breakpoints must increase strictly");
  }
  if (!(breaks_.back() < 1.0)) throw ClassError("breakpoints must lie in [0,1)");
  for (const auto& v : values_) {
    if (v.size() != values_[0].size()) throw ClassError("values have mixed dimensions");
  }
}

StepFunction StepFunction::constant(Carrier carrier, Point value) {
  return StepFunction(carrier, {0.0}, {std::move(value)});
}

Point StepFunction::mean() const {
  Point s = Point::Zero(dimension());
  for (size_t k = 0; k < pieces(); ++k) s += length(k) * values_[k];
  return s;
}

size_t StepFunction::piece_at(double t) const {
  double u = t;
  if (carrier_ == Carrier::circle) u = t - std::floor(t);
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), u);
  size_t k = static_cast<size_t>(it - breaks_.begin());
  return k == 0 ? 0 : k - 1;
}

Point StepFunction::primitive(double t) const {
  double whole = 0.0;
  double u = t;
  if (carrier_ == Carrier::circle) {
    whole = std::floor(t);
    u = t - whole;
  } else if (t < 0.0 || t > 1.0) {
    throw ClassError("interval primitive evaluated outside [0,1]");
  }
  Point s = Point::Zero(dimension());
  for (size_t k = 0; k < pieces(); ++k) {
    double lo = start(k), hi = end(k);
    if (u <= lo) break;
    s += (std::min(u, hi) - lo) * values_[k];
  }
  if (whole != 0.0) s += whole * mean();
  return s;
}

StepFunction StepFunction::rotated(double shift) const {
  if (carrier_ != Carrier::circle) throw ClassError("rotation needs a circle carrier");
  double sh = shift - std::floor(shift);
  if (sh == 0.0) return *this;
  // new breakpoints are old ones minus sh, wrapped; the piece containing sh
  // is cut in two
  std::vector<std::pair<double, Point>> pieces_out;
  size_t k0 = piece_at(sh);
  for (size_t s = 0; s < pieces(); ++s) {
    size_t k = (k0 + s) % pieces();
    double st = start(k) - sh;
    if (st < 0.0) st += 1.0;
    if (s == 0) st = 0.0;
    pieces_out.push_back({st, values_[k]});
  }
  if (start(k0) < sh) {
    double st = start(k0) - sh + 1.0;
    if (st < 1.0) pieces_out.push_back({st, values_[k0]});
  }
  std::vector<double> b;
  std::vector<Point> v;
  for (auto& [st, val] : pieces_out) {
    if (!b.empty() && !(st > b.back())) continue;
    b.push_back(st);
    v.push_back(val);
  }
  return StepFunction(Carrier::circle, b, v).merged(0.0);
}

StepFunction StepFunction::merged(double tol) const {
  std::vector<double> b{0.0};
  std::vector<Point> v{values_[0]};
  for (size_t k = 1; k < pieces(); ++k) {
    if ((values_[k] - v.back()).norm() <= tol) continue;
    b.push_back(breaks_[k]);
    v.push_back(values_[k]);
  }
  return StepFunction(carrier_, b, v);
}

StepFunction StepFunction::with_carrier(Carrier c) const { return StepFunction(c, breaks_, values_); }

void StepFunction::validate_on(const ConvexBody& outer) const {
  for (size_t k = 0; k < pieces(); ++k) {
    if (outer.contains(values_[k]) != Membership::boundary) {
      throw ClassError("value of piece " + std::to_string(k) + " is not on the fixed boundary");
    }
  }
}

bool BoundaryFunction::has(Regularity r) const {
  return std::find(tags.begin(), tags.end(), r) != tags.end();
}

BoundaryFunction BoundaryFunction::zero() {
  BoundaryFunction f;
  f.kind = "zero";
  f.eval = [](const Point&) { return 0.0; };
  f.tags = {Regularity::bounded_below, Regularity::lipschitz, Regularity::c2};
  f.lower_bound = 0.0;
  f.lipschitz = 0.0;
  return f;
}

BoundaryFunction BoundaryFunction::affine(Point coeffs, double constant) {
  BoundaryFunction f;
  f.kind = "affine";
  f.params.assign(coeffs.data(), coeffs.data() + coeffs.size());
  f.params.push_back(constant);
  f.eval = [coeffs, constant](const Point& p) { return coeffs.dot(p) + constant; };
  f.tags = {Regularity::lipschitz, Regularity::c2};
  f.lipschitz = coeffs.norm();
  return f;
}

BoundaryFunction BoundaryFunction::exp_coordinate(int k, double scale) {
  BoundaryFunction f;
  f.kind = "exp";
  f.params = {static_cast<double>(k), scale};
  f.eval = [k, scale](const Point& p) { return std::exp(scale * p[k]); };
  f.tags = {Regularity::bounded_below, Regularity::c2};
  f.lower_bound = 0.0;
  f.lipschitz = std::abs(scale) * std::exp(std::abs(scale));
  return f;
}

BoundaryFunction BoundaryFunction::indicator_coordinate(int k, double threshold) {
  BoundaryFunction f;
  f.kind = "indicator";
  f.params = {static_cast<double>(k), threshold};
  f.eval = [k, threshold](const Point& p) { return p[k] >= threshold ? 1.0 : 0.0; };
  f.tags = {Regularity::bounded_below, Regularity::indicator};
  f.lower_bound = 0.0;
  return f;
}

BoundaryFunction BoundaryFunction::power_coordinate(int k, double power) {
  BoundaryFunction f;
  f.kind = "power";
  f.params = {static_cast<double>(k), power};
  f.eval = [k, power](const Point& p) { return std::pow(std::abs(p[k]), power); };
  f.tags = {Regularity::bounded_below};
  if (power >= 1.0) f.tags.push_back(Regularity::lipschitz);
  f.lower_bound = 0.0;
  if (power >= 1.0) f.lipschitz = power;
  return f;
}

BoundaryFunction BoundaryFunction::channel() {
  BoundaryFunction f;
  f.kind = "channel";
  f.eval = [](const Point& p) { return p[1] <= 0.0 ? 0.0 : -p[1]; };
  f.tags = {Regularity::bounded_below, Regularity::lipschitz};
  f.lower_bound = -1.0;
  f.lipschitz = 1.0;
  return f;
}

BoundaryFunction BoundaryFunction::cos_angle(int m) {
  BoundaryFunction f;
  f.kind = "cos_angle";
  f.params = {static_cast<double>(m)};
  f.eval = [m](const Point& p) { return std::cos(m * std::atan2(p[1], p[0])); };
  f.tags = {Regularity::bounded_below, Regularity::lipschitz, Regularity::c2};
  f.lower_bound = -1.0;
  // Re((x+iy)^m) has gradient norm m on the unit disk
  f.lipschitz = static_cast<double>(m);
  return f;
}

Point average(const StepFunction& phi, double a, double b) {
  if (!(b > a)) throw ClassError("average over a degenerate interval");
  if (phi.carrier() == Carrier::interval && (a < -1e-15 || b > 1.0 + 1e-15)) {
    throw ClassError("subinterval outside [0,1]");
  }
  if (phi.carrier() == Carrier::interval) {
    a = std::max(a, 0.0);
    b = std::min(b, 1.0);
  }
  return (phi.primitive(b) - phi.primitive(a)) / (b - a);
}

namespace {

struct Corner {
  double m;
  Point s;
};

// Arcs starting in piece i (the last A of it), running over the middle
// pieces and ending in piece j (the first B of it). Wrap marks a circle arc
// that starts and ends in the same piece.
struct Family {
  size_t i = 0, j = 0;
  double M = 0.0;
  Point W;
  bool wrap = false;
  bool single = false;  // remainder inside one piece (winding arcs only)
};

struct Engine {
  const StepFunction& phi;
  const std::vector<ConvexBody>& forbidden;
  const MembershipOptions& opts;
  MembershipReport rep;
  Point M0;
  bool found_violation = false;

  Engine(const StepFunction& f, const std::vector<ConvexBody>& bodies, const MembershipOptions& o)
      : phi(f), forbidden(bodies), opts(o) {
    rep.margin = kInf;
    M0 = phi.mean();
  }

  std::vector<Corner> corners(const Family& fam) const {
    const auto& v = phi.values();
    double mi = phi.length(fam.i), mj = phi.length(fam.j);
    std::vector<Corner> c;
    if (fam.single) {
      c.push_back({0.0, Point::Zero(M0.size())});
      c.push_back({mi, mi * v[fam.i]});
      return c;
    }
    if (fam.wrap) {
      c.push_back({fam.M, fam.W});
      c.push_back({1.0, fam.W + mi * v[fam.i]});
      return c;
    }
    if (fam.M > 0.0) c.push_back({fam.M, fam.W});
    c.push_back({mi + fam.M, mi * v[fam.i] + fam.W});
    c.push_back({fam.M + mj, fam.W + mj * v[fam.j]});
    c.push_back({mi + fam.M + mj, mi * v[fam.i] + fam.W + mj * v[fam.j]});
    return c;
  }

  static std::vector<Point> images(const std::vector<Corner>& cs, double k, const Point& M0) {
    std::vector<Point> pts;
    for (const auto& c : cs) {
      double den = k + c.m;
      if (den <= 0.0) continue;
      pts.push_back((k * M0 + c.s) / den);
    }
    return pts;
  }

  // Margin of a point set hull against the forbidden bodies.
  double hull_margin(const std::vector<Point>& pts, Point* argmin, int* which) const {
    double best = kInf;
    for (size_t b = 0; b < forbidden.size(); ++b) {
      Point q;
      double m = hull_min_signed_distance(forbidden[b], pts, &q);
      if (m < best) {
        best = m;
        if (argmin) *argmin = q;
        if (which) *which = static_cast<int>(b);
      }
    }
    return best;
  }

  // Arc [s, e] of the family with remainder masses A, B after k turns.
  std::pair<double, double> arc(const Family& fam, double k, double A, double B) const {
    double s = phi.end(fam.i) - A;
    if (fam.single) {
      s = phi.start(fam.i);
      return {s, s + k + A};
    }
    double len = k + A + fam.M + B;
    return {s, s + len};
  }

  double depth_at(const Point& p) const {
    double best = kInf;
    for (const auto& b : forbidden) best = std::min(best, b.signed_distance(p));
    return best;
  }

  // Find (A, B) whose arc average enters a forbidden body.
  void witness(const Family& fam, double k, const Point& q) {
    const auto& v = phi.values();
    double mi = phi.length(fam.i), mj = phi.length(fam.j);
    double bestd = kInf;
    std::pair<double, double> best_arc{0.0, 1.0};
    auto consider = [&](double A, double B) {
      if (fam.single) B = 0.0;
      if (fam.wrap && A + B > mi) return;
      if (A < 0.0 || B < 0.0) return;
      auto [s, e] = arc(fam, k, A, B);
      if (!(e > s)) return;
      if (phi.carrier() == Carrier::interval && (s < 0.0 || e > 1.0)) return;
      Point avg = average(phi, s, e);
      double d = depth_at(avg);
      if (d < bestd) {
        bestd = d;
        best_arc = {s, e};
      }
    };
    if (!fam.single) {
      // least squares for A (v_i - q) + B (v_j - q) = q (k + M) - k M0 - W
      Eigen::MatrixXd G(q.size(), 2);
      G.col(0) = v[fam.i] - q;
      G.col(1) = v[fam.j] - q;
      Point rhs = q * (k + fam.M) - k * M0 - fam.W;
      Eigen::Vector2d ab = G.colPivHouseholderQr().solve(rhs);
      double hiB = fam.wrap ? mi : mj;
      consider(std::clamp(ab[0], 0.0, mi), std::clamp(ab[1], 0.0, hiB));
    }
    const int n = 48;
    double hiB = fam.wrap ? mi : mj;
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; b <= (fam.single ? 0 : n); ++b) consider(mi * a / n, hiB * b / n);
    }
    if (bestd < 0.0) {
      rep.witness = best_arc;
      rep.witness_average = average(phi, best_arc.first, best_arc.second);
    }
  }

  // Returns false when the search should stop.
  bool check(const Family& fam, double k) {
    auto pts = images(corners(fam), k, M0);
    if (pts.empty()) return true;
    Point q;
    double m = hull_margin(pts, &q, nullptr);
    ++rep.polygons_checked;
    rep.margin = std::min(rep.margin, m);
    if (m < -opts.margin_tol && !found_violation) {
      witness(fam, k, q);
      if (rep.witness) found_violation = true;
    }
    return !(found_violation && opts.stop_at_first_violation);
  }

  void finish() {
    if (found_violation) rep.verdict = MembershipVerdict::violated;
    else if (rep.margin > opts.margin_tol) rep.verdict = MembershipVerdict::member;
    else rep.verdict = MembershipVerdict::inconclusive;
    if (!std::isfinite(rep.margin)) rep.margin = kInf;
  }
};

Family make_family(const StepFunction& phi, size_t i, size_t j, bool cyclic) {
  Family fam;
  fam.i = i;
  fam.j = j;
  fam.W = Point::Zero(phi.dimension());
  const size_t n = phi.pieces();
  fam.wrap = cyclic && i == j;
  for (size_t k = (i + 1) % n; k != j; k = (k + 1) % n) {
    fam.M += phi.length(k);
    fam.W += phi.length(k) * phi.values()[k];
  }
  return fam;
}

}  // namespace

MembershipReport interval_membership(const StepFunction& phi, const LensDomain& lens,
                                     const MembershipOptions& opts) {
  if (phi.carrier() != Carrier::interval) throw ClassError("interval membership needs an interval carrier");
  Engine eng(phi, lens.holes(), opts);
  const size_t n = phi.pieces();
  // single-piece subintervals average to a fixed-boundary value
  for (size_t i = 0; i < n; ++i) eng.rep.margin = std::min(eng.rep.margin, eng.depth_at(phi.values()[i]));
  bool go = true;
  for (size_t i = 0; i < n && go; ++i) {
    for (size_t j = i + 1; j < n && go; ++j) go = eng.check(make_family(phi, i, j, false), 0.0);
  }
  eng.finish();
  eng.rep.note = "exact projective images of all subinterval families";
  return eng.rep;
}

MembershipReport circle_membership(const StepFunction& phi, const LensDomain& lens,
                                   const std::vector<ConvexBody>& hat_holes,
                                   const MembershipOptions& opts) {
  if (phi.carrier() != Carrier::circle) throw ClassError("circle membership needs a circle carrier");
  if (hat_holes.empty()) throw ClassError("no enlarged hole given");
  for (const auto& h : lens.holes()) {
    bool covered = false;
    for (const auto& hat : hat_holes) {
      bool all = hat.strictly_inside(h.interior_point());
      for (const auto& p : sample_boundary(h, 128)) {
        if (!all) break;
        all = hat.signed_distance(p) < 0.0;
      }
      if (all) {
        covered = true;
        break;
      }
    }
    if (!covered) throw ClassError("enlarged hole does not contain the closure of the hole");
  }
  for (const auto& hat : hat_holes) {
    for (const auto& p : sample_boundary(hat, 128)) {
      if (!(lens.outer().signed_distance(p) < -lens.outer().boundary_tol())) {
        throw ClassError("closure of the enlarged hole leaves the outer body");
      }
    }
  }

  Engine eng(phi, hat_holes, opts);
  const size_t n = phi.pieces();
  for (size_t i = 0; i < n; ++i) eng.rep.margin = std::min(eng.rep.margin, eng.depth_at(phi.values()[i]));
  // full turns: the mean itself
  double d0 = eng.depth_at(eng.M0);
  eng.rep.margin = std::min(eng.rep.margin, d0);
  if (d0 < -opts.margin_tol) {
    eng.found_violation = true;
    eng.rep.witness = std::pair{0.0, 1.0};
    eng.rep.witness_average = eng.M0;
  }
  if (n == 1 || (eng.found_violation && opts.stop_at_first_violation)) {
    eng.finish();
    return eng.rep;
  }
  std::vector<Family> fams;
  for (size_t i = 0; i < n; ++i) {
    for (size_t s = 1; s <= n; ++s) fams.push_back(make_family(phi, i, (i + s) % n, true));
  }
  bool go = true;
  for (size_t f = 0; f < fams.size() && go; ++f) go = eng.check(fams[f], 0.0);

  // Winding arcs: k turns plus a remainder. For k >= 1 every image lies in
  // conv(M0, image at k = 1), so one hull covers all windings unless it
  // comes too close; then integer windings are enumerated.
  std::vector<Family> wfams = fams;
  for (size_t i = 0; i < n; ++i) {
    Family s;
    s.i = s.j = i;
    s.single = true;
    s.W = Point::Zero(phi.dimension());
    wfams.push_back(s);
  }
  double D = 0.0;
  for (const auto& fam : wfams) {
    for (const auto& c : eng.corners(fam)) D = std::max(D, (c.s - c.m * eng.M0).norm());
  }
  for (size_t f = 0; f < wfams.size() && go; ++f) {
    auto pts = Engine::images(eng.corners(wfams[f]), 1.0, eng.M0);
    pts.push_back(eng.M0);
    double m = eng.hull_margin(pts, nullptr, nullptr);
    eng.rep.polygons_checked++;
    if (m > opts.margin_tol) {
      eng.rep.margin = std::min(eng.rep.margin, m);
      continue;
    }
    int K = opts.max_windings;
    if (d0 > 0.0) K = std::min(K, static_cast<int>(std::ceil(2.0 * D / d0)) + 1);
    for (int k = 1; k <= K && go; ++k) {
      go = eng.check(wfams[f], static_cast<double>(k));
      eng.rep.windings_checked = std::max(eng.rep.windings_checked, k);
    }
    if (d0 > 0.0) {
      // windings beyond K stay within D / K of the mean
      eng.rep.margin = std::min(eng.rep.margin, d0 - D / std::max(K, 1));
    } else {
      eng.rep.margin = std::min(eng.rep.margin, d0);
    }
  }
  eng.finish();
  eng.rep.note = "arcs below one turn exactly; winding arcs by mean decomposition";
  return eng.rep;
}

MembershipReport circle_membership(const StepFunction& phi, const LensDomain& lens,
                                   const ConvexBody& hat_hole, const MembershipOptions& opts) {
  return circle_membership(phi, lens, std::vector<ConvexBody>{hat_hole}, opts);
}

std::optional<Segment> find_clear_chord(const LensDomain& lens, const Point& x, int fan) {
  if (!lens.contains(x)) throw GeometryError("point is outside the lens");
  const int d = lens.dimension();
  std::vector<Point> dirs;
  for (const auto& h : lens.holes()) {
    // tangent directions of the level set of the hole distance through x
    double eta = 1e-7 * h.scale();
    Point g(d);
    for (int i = 0; i < d; ++i) {
      Point e = Point::Zero(d);
      e[i] = eta;
      g[i] = (h.signed_distance(x + e) - h.signed_distance(x - e)) / (2.0 * eta);
    }
    if (!(g.norm() > 0.0)) continue;
    g.normalize();
    for (int i = 0; i < d; ++i) {
      Point e = Point::Zero(d);
      e[i] = 1.0;
      e -= e.dot(g) * g;
      if (e.norm() > 1e-8) dirs.push_back(e.normalized());
    }
  }
  for (int k = 0; k < fan; ++k) dirs.push_back(golden_direction(d, k));
  for (const auto& u : dirs) {
    auto s = max_chord(lens, x, u);
    if (s) return s;
  }
  return std::nullopt;
}

std::optional<StepFunction> two_point_function(const LensDomain& lens, const Point& x) {
  if (!lens.contains(x)) throw GeometryError("point is outside the lens");
  if (lens.on_fixed_boundary(x)) return StepFunction::constant(Carrier::interval, x);
  auto chord = find_clear_chord(lens, x);
  if (!chord) return std::nullopt;
  double len = chord->length();
  double alpha = (x - chord->b).norm() / len;
  if (alpha <= 0.0 || alpha >= 1.0) return StepFunction::constant(Carrier::interval, x);
  return StepFunction(Carrier::interval, {0.0, alpha}, {chord->a, chord->b});
}

double payoff(const StepFunction& phi, const BoundaryFunction& f) {
  double s = 0.0;
  for (size_t k = 0; k < phi.pieces(); ++k) s += phi.length(k) * f(phi.values()[k]);
  return s;
}

StepFunction canonical_embedding(EmbeddingKind kind, std::vector<double> breakpoints,
                                 const std::vector<Point>& data, Carrier carrier) {
  std::vector<Point> values;
  for (const auto& v : data) {
    switch (kind) {
      case EmbeddingKind::a2: {
        if (v.size() != 1) throw ClassError("weight data must be scalar");
        if (!(v[0] > 0.0)) throw ClassError("weights must be positive");
        values.push_back(make_point(v[0], 1.0 / v[0]));
        break;
      }
      case EmbeddingKind::bmo: {
        Point p(v.size() + 1);
        p.head(v.size()) = v;
        p[v.size()] = v.squaredNorm();
        values.push_back(p);
        break;
      }
      case EmbeddingKind::sphere: {
        if (std::abs(v.norm() - 1.0) > 1e-12) throw ClassError("value is off the unit sphere");
        values.push_back(v);
        break;
      }
    }
  }
  return StepFunction(carrier, std::move(breakpoints), std::move(values));
}

}  // namespace lensbell
