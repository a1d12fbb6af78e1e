#include "lensbell/body.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/Polynomials>

namespace lensbell {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

bool is_finite(double v) { return std::isfinite(v); }

// Real roots of a t^2 + b t + c, ascending. Empty when none.
std::vector<double> quadratic_roots(double a, double b, double c) {
  if (a == 0.0) {
    if (b == 0.0) return {};
    return {-c / b};
  }
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {};
  double sq = std::sqrt(disc);
  double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double r1, r2;
  if (q == 0.0) {
    r1 = r2 = 0.0;
  } else {
    r1 = q / a;
    r2 = c / q;
  }
  if (r1 > r2) std::swap(r1, r2);
  return {r1, r2};
}

// { t : a t^2 + b t + c < 0 } as a list of disjoint open intervals.
std::vector<LineInterval> quadratic_negative_set(double a, double b, double c) {
  if (a == 0.0) {
    if (b == 0.0) {
      if (c < 0.0) return {{-kInf, kInf}};
      return {};
    }
    double r = -c / b;
    if (b > 0.0) return {{-kInf, r}};
    return {{r, kInf}};
  }
  auto roots = quadratic_roots(a, b, c);
  if (a > 0.0) {
    if (roots.size() < 2 || !(roots[0] < roots[1])) return {};
    return {{roots[0], roots[1]}};
  }
  if (roots.size() < 2) return {{-kInf, kInf}};
  return {{-kInf, roots[0]}, {roots[1], kInf}};
}

std::vector<LineInterval> quadratic_positive_set(double a, double b, double c) {
  return quadratic_negative_set(-a, -b, -c);
}

// { t : b t + c > 0 }
LineInterval linear_positive_set(double b, double c) {
  if (b == 0.0) {
    if (c > 0.0) return {-kInf, kInf};
    return {0.0, 0.0};
  }
  double r = -c / b;
  if (b > 0.0) return {r, kInf};
  return {-kInf, r};
}

LineInterval intersect(LineInterval a, LineInterval b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

std::optional<LineInterval> longest_nonempty(const std::vector<LineInterval>& parts) {
  std::optional<LineInterval> best;
  for (const auto& p : parts) {
    if (!(p.lo < p.hi)) continue;
    if (!best || (p.hi - p.lo) > (best->hi - best->lo)) best = p;
  }
  return best;
}

std::optional<LineInterval> single(const std::vector<LineInterval>& parts) {
  return longest_nonempty(parts);
}

template <class F>
double golden_min(F&& f, double lo, double hi, int iters, double* argmin) {
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
  }
  double best_x = f1 <= f2 ? x1 : x2;
  double best = std::min(f1, f2);
  double fa = f(lo), fb = f(hi);
  if (fa < best) {
    best = fa;
    best_x = lo;
  }
  if (fb < best) {
    best = fb;
    best_x = hi;
  }
  if (argmin) *argmin = best_x;
  return best;
}

// Real roots of the depressed cubic s^3 + p s + q = 0.
std::vector<double> depressed_cubic_roots(double p, double q) {
  std::vector<double> out;
  if (p == 0.0) {
    out.push_back(std::cbrt(-q));
    return out;
  }
  double disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
  if (disc > 0.0) {
    double sq = std::sqrt(disc);
    out.push_back(std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq));
  } else {
    double r = 2.0 * std::sqrt(-p / 3.0);
    double arg = (3.0 * q / (2.0 * p)) * std::sqrt(-3.0 / p);
    arg = std::clamp(arg, -1.0, 1.0);
    double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) out.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0));
  }
  for (double& s : out) {
    for (int it = 0; it < 4; ++it) {
      double g = s * s * s + p * s + q;
      double dg = 3.0 * s * s + p;
      if (dg == 0.0) break;
      double step = g / dg;
      s -= step;
      if (std::abs(step) <= 1e-16 * (1.0 + std::abs(s))) break;
    }
  }
  return out;
}

// Real parts of the roots of a quartic (coefficients ascending), polished.
std::vector<double> quartic_real_parts(const Eigen::Matrix<double, 5, 1>& coeffs) {
  std::vector<double> out;
  Eigen::PolynomialSolver<double, 4> solver;
  solver.compute(coeffs);
  for (int i = 0; i < 4; ++i) {
    double s = solver.roots()[i].real();
    out.push_back(s);
    double t = s;
    for (int it = 0; it < 6; ++it) {
      double g = Eigen::poly_eval(coeffs, t);
      double dg = 4 * coeffs[4] * t * t * t + 3 * coeffs[3] * t * t + 2 * coeffs[2] * t + coeffs[1];
      if (dg == 0.0) break;
      double step = g / dg;
      if (!std::isfinite(step)) break;
      t -= step;
    }
    if (std::isfinite(t)) out.push_back(t);
  }
  return out;
}

Point split_x(const Point& p) { return p.head(p.size() - 1); }

}  // namespace

Point make_point(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

Point make_point(double x, double y, double z) {
  Point p(3);
  p << x, y, z;
  return p;
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::inside: return "inside";
    case Membership::boundary: return "boundary";
    case Membership::outside: return "outside";
  }
  return "?";
}

const char* to_string(BodyKind k) {
  switch (k) {
    case BodyKind::ball: return "ball";
    case BodyKind::ellipsoid: return "ellipsoid";
    case BodyKind::paraboloid: return "paraboloid";
    case BodyKind::hyperbola: return "hyperbola";
    case BodyKind::hyperboloid: return "hyperboloid";
    case BodyKind::homothety: return "homothety";
    case BodyKind::inflation: return "inflation";
    case BodyKind::blend: return "blend";
  }
  return "?";
}

bool LineInterval::bounded() const { return is_finite(lo) && is_finite(hi); }

struct ConvexBody::Data {
  BodyKind kind = BodyKind::ball;
  int dim = 2;
  Point c;
  Point v;
  double a = 0.0;
  double b = 0.0;
  std::vector<ConvexBody> kids;
};

ConvexBody::ConvexBody(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

ConvexBody ConvexBody::ball(Point center, double radius) {
  if (!(radius > 0.0)) throw GeometryError("ball radius must be positive");
  if (center.size() < 1) throw GeometryError("ball center has no coordinates");
  auto d = std::make_shared<Data>();
  d->kind = BodyKind::ball;
  d->dim = static_cast<int>(center.size());
  d->c = std::move(center);
  d->a = radius;
  return ConvexBody(d);
}

ConvexBody ConvexBody::ellipsoid(Point center, Point semi_axes) {
  if (center.size() != semi_axes.size()) throw GeometryError("ellipsoid dimension mismatch");
  if ((semi_axes.array() <= 0.0).any()) throw GeometryError("ellipsoid axes must be positive");
  if ((semi_axes.array() == semi_axes[0]).all()) return ball(std::move(center), semi_axes[0]);
  auto d = std::make_shared<Data>();
  d->kind = BodyKind::ellipsoid;
  d->dim = static_cast<int>(center.size());
  d->c = std::move(center);
  d->v = std::move(semi_axes);
  return ConvexBody(d);
}

ConvexBody ConvexBody::paraboloid(int dim, double offset) {
  if (dim < 2) throw GeometryError("paraboloid needs dimension >= 2");
  auto d = std::make_shared<Data>();
  d->kind = BodyKind::paraboloid;
  d->dim = dim;
  d->a = offset;
  return ConvexBody(d);
}

ConvexBody ConvexBody::hyperbola(double shift, double level) {
  if (!(level > 0.0)) throw GeometryError("hyperbola level must be positive");
  auto d = std::make_shared<Data>();
  d->kind = BodyKind::hyperbola;
  d->dim = 2;
  d->a = shift;
  d->b = level;
  return ConvexBody(d);
}

ConvexBody ConvexBody::hyperboloid(int dim, double a) {
  if (dim < 2) throw GeometryError("hyperboloid needs dimension >= 2");
  if (!(a > 0.0)) throw GeometryError("hyperboloid parameter must be positive");
  auto d = std::make_shared<Data>();
  d->kind = BodyKind::hyperboloid;
  d->dim = dim;
  d->a = a;
  return ConvexBody(d);
}

ConvexBody ConvexBody::homothety(const ConvexBody& body, Point center, double factor) {
  if (!(factor > 0.0)) throw GeometryError("homothety factor must be positive");
  if (center.size() != body.dimension()) throw GeometryError("homothety dimension mismatch");
  if (factor == 1.0) return body;
  if (body.kind() == BodyKind::ball) {
    return ball(center + factor * (body.center() - center), factor * body.p0());
  }
  if (body.kind() == BodyKind::ellipsoid) {
    return ellipsoid(center + factor * (body.center() - center), factor * body.vec());
  }
  if (body.kind() == BodyKind::homothety) {
    // c2 + l2 (c1 + l1 (K - c1) - c2) = C + l1 l2 (K - C)
    const Point& c1 = body.center();
    double l1 = body.p0();
    double l = l1 * factor;
    if (std::abs(1.0 - l) > 1e-15) {
      Point c = ((1.0 - l1) * factor * c1 + (1.0 - factor) * center) / (1.0 - l);
      return homothety(body.children()[0], c, l);
    }
  }
  auto d = std::make_shared<Data>();
  d->kind = BodyKind::homothety;
  d->dim = body.dimension();
  d->c = std::move(center);
  d->a = factor;
  d->kids = {body};
  return ConvexBody(d);
}

ConvexBody ConvexBody::inflation(const ConvexBody& body, double margin) {
  if (margin < 0.0) throw GeometryError("inflation margin must be nonnegative");
  if (margin == 0.0) return body;
  if (body.kind() == BodyKind::ball) return ball(body.center(), body.p0() + margin);
  auto d = std::make_shared<Data>();
  d->kind = BodyKind::inflation;
  d->dim = body.dimension();
  d->a = margin;
  d->kids = {body};
  return ConvexBody(d);
}

ConvexBody ConvexBody::blend(const ConvexBody& first, const ConvexBody& second, double eps) {
  if (first.dimension() != second.dimension()) throw GeometryError("blend dimension mismatch");
  if (!(eps >= 0.0 && eps <= 1.0)) throw GeometryError("blend weight outside [0,1]");
  if (eps == 0.0) return first;
  if (eps == 1.0) return second;
  if (first.kind() == BodyKind::ball && second.kind() == BodyKind::ball) {
    return ball((1.0 - eps) * first.center() + eps * second.center(),
                (1.0 - eps) * first.p0() + eps * second.p0());
  }
  if (first.kind() == BodyKind::paraboloid && second.kind() == BodyKind::paraboloid) {
    return paraboloid(first.dimension(), (1.0 - eps) * first.p0() + eps * second.p0());
  }
  auto d = std::make_shared<Data>();
  d->kind = BodyKind::blend;
  d->dim = first.dimension();
  d->a = eps;
  d->kids = {first, second};
  return ConvexBody(d);
}

int ConvexBody::dimension() const { return d_->dim; }
BodyKind ConvexBody::kind() const { return d_->kind; }
const Point& ConvexBody::center() const { return d_->c; }
const Point& ConvexBody::vec() const { return d_->v; }
double ConvexBody::p0() const { return d_->a; }
double ConvexBody::p1() const { return d_->b; }
const std::vector<ConvexBody>& ConvexBody::children() const { return d_->kids; }

bool ConvexBody::bounded() const {
  switch (d_->kind) {
    case BodyKind::ball:
    case BodyKind::ellipsoid: return true;
    case BodyKind::paraboloid:
    case BodyKind::hyperbola:
    case BodyKind::hyperboloid: return false;
    case BodyKind::homothety:
    case BodyKind::inflation: return d_->kids[0].bounded();
    case BodyKind::blend: return d_->kids[0].bounded() && d_->kids[1].bounded();
  }
  return false;
}

double ConvexBody::scale() const {
  const Data& d = *d_;
  switch (d.kind) {
    case BodyKind::ball: return 2.0 * d.a;
    case BodyKind::ellipsoid: return 2.0 * d.v.maxCoeff();
    case BodyKind::paraboloid: return std::max(1.0, std::abs(d.a));
    case BodyKind::hyperbola: return std::max(1.0, std::sqrt(d.b));
    case BodyKind::hyperboloid: return std::max(1.0, d.a);
    case BodyKind::homothety: return d.a * d.kids[0].scale();
    case BodyKind::inflation: return d.kids[0].scale() + 2.0 * d.a;
    case BodyKind::blend: return (1.0 - d.a) * d.kids[0].scale() + d.a * d.kids[1].scale();
  }
  return 1.0;
}

double ConvexBody::signed_distance(const Point& p) const {
  const Data& d = *d_;
  if (p.size() != d.dim) throw GeometryError("point dimension does not match body");
  switch (d.kind) {
    case BodyKind::ball: return (p - d.c).norm() - d.a;
    case BodyKind::ellipsoid: return generic_signed_distance(p);
    case BodyKind::paraboloid: {
      double y = p[d.dim - 1];
      double rho = split_x(p).norm();
      double off = d.a;
      auto roots = depressed_cubic_roots((1.0 + 2.0 * (off - y)) / 2.0, -rho / 2.0);
      double best = kInf;
      for (double s : roots) {
        double dy = s * s + off - y;
        best = std::min(best, std::hypot(s - rho, dy));
      }
      // the closest point can also be approached from the mirrored side
      best = std::min(best, std::hypot(rho, off - y));
      bool inside = y > rho * rho + off;
      return inside ? -best : best;
    }
    case BodyKind::hyperbola: {
      double u = p[0] - d.a, v = p[1] - d.a, c = d.b;
      Eigen::Matrix<double, 5, 1> co;
      co << -c * c, v * c, 0.0, -u, 1.0;
      double best = kInf;
      for (double w : quartic_real_parts(co)) {
        if (!(w > 0.0)) continue;
        best = std::min(best, std::hypot(w - u, c / w - v));
      }
      if (!std::isfinite(best)) {
        // fall back to a dense scan; only reached for degenerate inputs
        for (int k = -400; k <= 400; ++k) {
          double w = std::sqrt(c) * std::exp(k / 40.0);
          best = std::min(best, std::hypot(w - u, c / w - v));
        }
      }
      bool inside = u > 0.0 && v > 0.0 && u * v > c;
      return inside ? -best : best;
    }
    case BodyKind::hyperboloid: {
      double y = p[d.dim - 1];
      double rho = split_x(p).norm();
      double a = d.a;
      Eigen::Matrix<double, 5, 1> co;
      co << rho * rho * a * a, -4.0 * rho * a * a, rho * rho + 4.0 * a * a - y * y, -4.0 * rho, 4.0;
      double best = std::hypot(rho, a - y);
      for (double s : quartic_real_parts(co)) {
        best = std::min(best, std::hypot(s - rho, std::sqrt(s * s + a * a) - y));
      }
      bool inside = y > std::sqrt(rho * rho + a * a);
      return inside ? -best : best;
    }
    case BodyKind::homothety: {
      Point q = d.c + (p - d.c) / d.a;
      return d.a * d.kids[0].signed_distance(q);
    }
    case BodyKind::inflation: return d.kids[0].signed_distance(p) - d.a;
    case BodyKind::blend: return generic_signed_distance(p);
  }
  return kInf;
}

double ConvexBody::generic_signed_distance(const Point& p) const {
  // sup over unit u of <u, p> - h(u)
  auto value = [&](const Point& u) {
    double h = support(u);
    if (!std::isfinite(h)) return -kInf;
    return u.dot(p) - h;
  };
  const int dim = d_->dim;
  if (dim == 2) {
    auto at = [&](double th) { return value(make_point(std::cos(th), std::sin(th))); };
    const int n = 720;
    std::vector<double> vals(n);
    for (int k = 0; k < n; ++k) vals[k] = at(2.0 * std::numbers::pi * k / n);
    std::vector<int> peaks;
    for (int k = 0; k < n; ++k) {
      double l = vals[(k + n - 1) % n], r = vals[(k + 1) % n];
      if (vals[k] >= l && vals[k] >= r && std::isfinite(vals[k])) peaks.push_back(k);
    }
    std::sort(peaks.begin(), peaks.end(), [&](int i, int j) { return vals[i] > vals[j]; });
    if (peaks.size() > 3) peaks.resize(3);
    double best = -kInf;
    for (int k = 0; k < n; ++k) best = std::max(best, vals[k]);
    const double step = 2.0 * std::numbers::pi / n;
    for (int k : peaks) {
      double th0 = step * k;
      double arg;
      double m = golden_min([&](double th) { return -at(th); }, th0 - step, th0 + step, 90, &arg);
      best = std::max(best, -m);
    }
    return best;
  }
  // higher dimension: seed from a nested direction set, then pattern search
  const int n = 2000;
  double best = -kInf;
  Point bu;
  for (int k = 0; k < n; ++k) {
    Point u = golden_direction(dim, k);
    double v = value(u);
    if (v > best) {
      best = v;
      bu = u;
    }
  }
  if (!std::isfinite(best)) return best;
  double step = 0.1;
  while (step > 1e-13) {
    bool improved = false;
    for (int i = 0; i < dim && !improved; ++i) {
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        Point u = bu;
        u[i] += sgn * step;
        u.normalize();
        double v = value(u);
        if (v > best) {
          best = v;
          bu = u;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

double ConvexBody::distance(const Point& p) const {
  double sd = signed_distance(p);
  if (sd <= boundary_tol()) return 0.0;
  return sd;
}

Membership ConvexBody::contains(const Point& p) const {
  double sd = signed_distance(p);
  double tol = boundary_tol();
  if (std::abs(sd) <= tol) return Membership::boundary;
  return sd < 0.0 ? Membership::inside : Membership::outside;
}

double ConvexBody::support(const Point& u) const {
  const Data& d = *d_;
  switch (d.kind) {
    case BodyKind::ball: return d.c.dot(u) + d.a * u.norm();
    case BodyKind::ellipsoid: return d.c.dot(u) + (d.v.array() * u.array()).matrix().norm();
    case BodyKind::paraboloid: {
      double uy = u[d.dim - 1];
      double ux2 = split_x(u).squaredNorm();
      if (uy < 0.0) return -ux2 / (4.0 * uy) + uy * d.a;
      if (uy == 0.0 && ux2 == 0.0) return 0.0;
      return kInf;
    }
    case BodyKind::hyperbola: {
      double u1 = u[0], u2 = u[1];
      if (u1 <= 0.0 && u2 <= 0.0) return d.a * (u1 + u2) - 2.0 * std::sqrt(d.b * u1 * u2);
      return kInf;
    }
    case BodyKind::hyperboloid: {
      double uy = u[d.dim - 1];
      double ux = split_x(u).norm();
      if (uy < 0.0 && ux <= -uy) return -d.a * std::sqrt(std::max(0.0, uy * uy - ux * ux));
      return kInf;
    }
    case BodyKind::homothety: return (1.0 - d.a) * d.c.dot(u) + d.a * d.kids[0].support(u);
    case BodyKind::inflation: return d.kids[0].support(u) + d.a * u.norm();
    case BodyKind::blend: {
      double h0 = d.kids[0].support(u);
      double h1 = d.kids[1].support(u);
      if (!std::isfinite(h0) || !std::isfinite(h1)) return kInf;
      return (1.0 - d.a) * h0 + d.a * h1;
    }
  }
  return kInf;
}

std::optional<LineInterval> ConvexBody::line_interval(const Point& o, const Point& u) const {
  const Data& d = *d_;
  if (o.size() != d.dim || u.size() != d.dim) throw GeometryError("line dimension does not match body");
  if (u.squaredNorm() == 0.0) throw GeometryError("line direction is zero");
  switch (d.kind) {
    case BodyKind::ball: {
      Point w = o - d.c;
      return single(quadratic_negative_set(u.squaredNorm(), 2.0 * w.dot(u), w.squaredNorm() - d.a * d.a));
    }
    case BodyKind::ellipsoid: {
      Eigen::ArrayXd w = (o - d.c).array() / d.v.array();
      Eigen::ArrayXd e = u.array() / d.v.array();
      return single(quadratic_negative_set(e.square().sum(), 2.0 * (w * e).sum(), w.square().sum() - 1.0));
    }
    case BodyKind::paraboloid: {
      Point x = split_x(o), ux = split_x(u);
      double y = o[d.dim - 1], uy = u[d.dim - 1];
      return single(quadratic_negative_set(ux.squaredNorm(), 2.0 * x.dot(ux) - uy,
                                           x.squaredNorm() + d.a - y));
    }
    case BodyKind::hyperbola: {
      double u0 = o[0] - d.a, v0 = o[1] - d.a, du = u[0], dv = u[1];
      auto pos = quadratic_positive_set(du * dv, u0 * dv + v0 * du, u0 * v0 - d.b);
      LineInterval half = intersect(linear_positive_set(du, u0), linear_positive_set(dv, v0));
      std::vector<LineInterval> parts;
      for (auto& q : pos) parts.push_back(intersect(q, half));
      return longest_nonempty(parts);
    }
    case BodyKind::hyperboloid: {
      Point x = split_x(o), ux = split_x(u);
      double y = o[d.dim - 1], uy = u[d.dim - 1];
      auto pos = quadratic_positive_set(uy * uy - ux.squaredNorm(), 2.0 * (y * uy - x.dot(ux)),
                                        y * y - x.squaredNorm() - d.a * d.a);
      LineInterval half = linear_positive_set(uy, y);
      std::vector<LineInterval> parts;
      for (auto& q : pos) parts.push_back(intersect(q, half));
      return longest_nonempty(parts);
    }
    case BodyKind::homothety: {
      return d.kids[0].line_interval(d.c + (o - d.c) / d.a, u / d.a);
    }
    case BodyKind::inflation:
    case BodyKind::blend: break;
  }

  // Generic: the signed distance is convex along the line.
  auto g = [&](double t) { return signed_distance(o + t * u); };
  const double unit = scale() / u.norm();
  const double limit = 1e12 * unit;
  double g0 = g(0.0), gl = g(-unit), gr = g(unit);
  double a = -unit, c = unit;
  if (!(gl >= g0 && gr >= g0)) {
    double dir = gl < gr ? -1.0 : 1.0;
    double step = unit, prev = 0.0, cur = dir * unit;
    double gcur = dir < 0 ? gl : gr;
    bool done = false;
    while (!done && std::abs(cur) < limit) {
      double next = cur + dir * step * 2.0;
      double gnext = g(next);
      if (gnext >= gcur) {
        a = std::min(prev, next);
        c = std::max(prev, next);
        done = true;
      } else {
        prev = cur;
        cur = next;
        gcur = gnext;
        step *= 2.0;
      }
    }
    // descent that never stops means a recession direction
    if (!done) {
      a = std::min(prev, cur);
      c = std::max(prev, cur);
    }
  }
  double tmin;
  double gmin = golden_min(g, a, c, 120, &tmin);
  if (!(gmin < 0.0)) return std::nullopt;
  auto root = [&](double dir) {
    double inside = tmin, step = unit;
    double outside = tmin + dir * step;
    while (g(outside) < 0.0) {
      inside = outside;
      step *= 2.0;
      outside = tmin + dir * step;
      if (std::abs(outside - tmin) > limit) return dir * kInf;
    }
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (inside + outside);
      if (mid == inside || mid == outside) break;
      if (g(mid) < 0.0) inside = mid;
      else outside = mid;
    }
    return inside;
  };
  return LineInterval{root(-1.0), root(1.0)};
}

Point ConvexBody::interior_point() const {
  const Data& d = *d_;
  switch (d.kind) {
    case BodyKind::ball:
    case BodyKind::ellipsoid: return d.c;
    case BodyKind::paraboloid: {
      Point p = Point::Zero(d.dim);
      p[d.dim - 1] = d.a + 1.0;
      return p;
    }
    case BodyKind::hyperbola: {
      double w = d.a + 2.0 * std::sqrt(d.b);
      return make_point(w, w);
    }
    case BodyKind::hyperboloid: {
      Point p = Point::Zero(d.dim);
      p[d.dim - 1] = 2.0 * d.a;
      return p;
    }
    case BodyKind::homothety: return d.c + d.a * (d.kids[0].interior_point() - d.c);
    case BodyKind::inflation: return d.kids[0].interior_point();
    case BodyKind::blend:
      return (1.0 - d.a) * d.kids[0].interior_point() + d.a * d.kids[1].interior_point();
  }
  return Point::Zero(d.dim);
}

Point ConvexBody::normal(const Point& p) const {
  const Data& d = *d_;
  Point n;
  switch (d.kind) {
    case BodyKind::ball: n = p - d.c; break;
    case BodyKind::ellipsoid: n = ((p - d.c).array() / d.v.array().square()).matrix(); break;
    case BodyKind::paraboloid:
      n = Point(d.dim);
      n.head(d.dim - 1) = 2.0 * split_x(p);
      n[d.dim - 1] = -1.0;
      break;
    case BodyKind::hyperbola: n = make_point(-(p[1] - d.a), -(p[0] - d.a)); break;
    case BodyKind::hyperboloid: {
      n = Point(d.dim);
      Point x = split_x(p);
      n.head(d.dim - 1) = x / std::sqrt(x.squaredNorm() + d.a * d.a);
      n[d.dim - 1] = -1.0;
      break;
    }
    case BodyKind::homothety: return d.kids[0].normal(d.c + (p - d.c) / d.a);
    case BodyKind::inflation:
    case BodyKind::blend: {
      double eta = 1e-6 * scale();
      n = Point(d.dim);
      for (int i = 0; i < d.dim; ++i) {
        Point e = Point::Zero(d.dim);
        e[i] = eta;
        n[i] = (signed_distance(p + e) - signed_distance(p - e)) / (2.0 * eta);
      }
      break;
    }
  }
  double len = n.norm();
  if (!(len > 0.0)) throw GeometryError("normal undefined at this point");
  return n / len;
}

std::optional<Point> ConvexBody::boundary_point(double angle) const {
  if (d_->dim != 2) throw GeometryError("angle parametrization is planar only");
  return boundary_point_dir(make_point(std::cos(angle), std::sin(angle)));
}

std::optional<Point> ConvexBody::boundary_point_dir(const Point& u) const {
  if (d_->kind == BodyKind::ball) return d_->c + d_->a * u.normalized();
  Point ip = interior_point();
  auto li = line_interval(ip, u);
  if (!li || !std::isfinite(li->hi)) return std::nullopt;
  return ip + li->hi * u;
}

bool ConvexBody::is_recession_direction(const Point& u) const {
  auto li = line_interval(interior_point(), u);
  return li && std::isinf(li->hi);
}

std::vector<Point> ConvexBody::recession_sample(int n) const {
  std::vector<Point> out;
  if (bounded()) return out;
  for (int k = 0; k < n; ++k) {
    Point u = golden_direction(d_->dim, k);
    if (is_recession_direction(u)) out.push_back(u);
  }
  return out;
}

std::string ConvexBody::describe() const {
  std::ostringstream os;
  const Data& d = *d_;
  os << to_string(d.kind) << "(";
  switch (d.kind) {
    case BodyKind::ball: os << "center=" << d.c.transpose() << ", r=" << d.a; break;
    case BodyKind::ellipsoid: os << "center=" << d.c.transpose() << ", axes=" << d.v.transpose(); break;
    case BodyKind::paraboloid: os << "d=" << d.dim << ", offset=" << d.a; break;
    case BodyKind::hyperbola: os << "shift=" << d.a << ", level=" << d.b; break;
    case BodyKind::hyperboloid: os << "d=" << d.dim << ", a=" << d.a; break;
    case BodyKind::homothety:
      os << d.kids[0].describe() << ", center=" << d.c.transpose() << ", factor=" << d.a;
      break;
    case BodyKind::inflation: os << d.kids[0].describe() << ", margin=" << d.a; break;
    case BodyKind::blend:
      os << d.kids[0].describe() << ", " << d.kids[1].describe() << ", eps=" << d.a;
      break;
  }
  os << ")";
  return os.str();
}

std::pair<double, double> segment_min_signed_distance(const ConvexBody& body, const Point& a,
                                                      const Point& b) {
  Point ab = b - a;
  double len2 = ab.squaredNorm();
  if (len2 == 0.0) return {body.signed_distance(a), 0.0};
  if (body.kind() == BodyKind::ball) {
    double t = std::clamp((body.center() - a).dot(ab) / len2, 0.0, 1.0);
    return {(a + t * ab - body.center()).norm() - body.p0(), t};
  }
  double t;
  double v = golden_min([&](double s) { return body.signed_distance(a + s * ab); }, 0.0, 1.0, 80, &t);
  return {v, t};
}

namespace {

// Closest point of triangle abc to p, any dimension.
Point closest_on_triangle(const Point& p, const Point& a, const Point& b, const Point& c) {
  Point ab = b - a, ac = c - a, ap = p - a;
  double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  Point bp = p - b;
  double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  Point cp = p - c;
  double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  double denom = va + vb + vc;
  if (denom == 0.0) {
    // degenerate triangle: best of the three edges
    Point best = a;
    double bd = (p - a).squaredNorm();
    for (auto [s, e] : {std::pair{a, b}, std::pair{b, c}, std::pair{a, c}}) {
      Point se = e - s;
      double l2 = se.squaredNorm();
      double t = l2 > 0 ? std::clamp((p - s).dot(se) / l2, 0.0, 1.0) : 0.0;
      Point q = s + t * se;
      if ((p - q).squaredNorm() < bd) {
        bd = (p - q).squaredNorm();
        best = q;
      }
    }
    return best;
  }
  double v = vb / denom, w = vc / denom;
  return a + v * ab + w * ac;
}

}  // namespace

double triangle_min_signed_distance(const ConvexBody& body, const Point& a, const Point& b,
                                    const Point& c, Point* argmin) {
  if (body.kind() == BodyKind::ball) {
    Point q = closest_on_triangle(body.center(), a, b, c);
    if (argmin) *argmin = q;
    return (q - body.center()).norm() - body.p0();
  }
  Point ab = b - a, ac = c - a;
  auto inner = [&](double s, double* wbest) {
    double hi = 1.0 - s;
    if (hi <= 0.0) {
      if (wbest) *wbest = 0.0;
      return body.signed_distance(a + s * ab);
    }
    return golden_min([&](double w) { return body.signed_distance(a + s * ab + w * ac); }, 0.0, hi, 60,
                      wbest);
  };
  double s;
  double v = golden_min([&](double x) { return inner(x, nullptr); }, 0.0, 1.0, 60, &s);
  if (argmin) {
    double w;
    inner(s, &w);
    *argmin = a + s * ab + w * ac;
  }
  return v;
}

double hull_min_signed_distance(const ConvexBody& body, const std::vector<Point>& points,
                                Point* argmin) {
  if (points.empty()) throw GeometryError("hull of no points");
  const int dim = static_cast<int>(points[0].size());
  // drop duplicates
  std::vector<Point> pts;
  for (const auto& p : points) {
    bool dup = false;
    for (const auto& q : pts) {
      if ((p - q).norm() <= 1e-14 * (1.0 + q.norm())) {
        dup = true;
        break;
      }
    }
    if (!dup) pts.push_back(p);
  }
  if (pts.size() == 1) {
    if (argmin) *argmin = pts[0];
    return body.signed_distance(pts[0]);
  }
  auto seg = [&](const Point& a, const Point& b) {
    auto [v, t] = segment_min_signed_distance(body, a, b);
    return std::pair{v, Point(a + t * (b - a))};
  };
  if (pts.size() == 2) {
    auto [v, q] = seg(pts[0], pts[1]);
    if (argmin) *argmin = q;
    return v;
  }
  double best = std::numeric_limits<double>::infinity();
  Point bq;
  if (dim == 2) {
    // Andrew monotone chain
    std::vector<Point> s = pts;
    std::sort(s.begin(), s.end(), [](const Point& a, const Point& b) {
      return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    auto cross = [](const Point& o, const Point& a, const Point& b) {
      return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Point> h(2 * s.size());
    size_t k = 0;
    for (size_t i = 0; i < s.size(); ++i) {
      while (k >= 2 && cross(h[k - 2], h[k - 1], s[i]) <= 0) --k;
      h[k++] = s[i];
    }
    for (size_t i = s.size() - 1, t = k + 1; i > 0; --i) {
      while (k >= t && cross(h[k - 2], h[k - 1], s[i - 1]) <= 0) --k;
      h[k++] = s[i - 1];
    }
    h.resize(k - 1);
    if (h.size() <= 2) {
      auto [v, q] = seg(s.front(), s.back());
      if (argmin) *argmin = q;
      return v;
    }
    for (size_t i = 1; i + 1 < h.size(); ++i) {
      Point q;
      double v = triangle_min_signed_distance(body, h[0], h[i], h[i + 1], &q);
      if (v < best) {
        best = v;
        bq = q;
      }
    }
    if (argmin) *argmin = bq;
    return best;
  }
  const size_t n = pts.size();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      for (size_t l = j + 1; l < n; ++l) {
        Point q;
        double v = triangle_min_signed_distance(body, pts[i], pts[j], pts[l], &q);
        if (v < best) {
          best = v;
          bq = q;
        }
      }
  if (dim == 3 && n >= 4) {
    Point ip = body.interior_point();
    double sip = body.signed_distance(ip);
    if (sip < best) {
      bool in = false;
      for (size_t i = 0; i < n && !in; ++i)
        for (size_t j = i + 1; j < n && !in; ++j)
          for (size_t l = j + 1; l < n && !in; ++l)
            for (size_t m = l + 1; m < n && !in; ++m) {
              Eigen::Matrix3d A;
              A.col(0) = pts[j] - pts[i];
              A.col(1) = pts[l] - pts[i];
              A.col(2) = pts[m] - pts[i];
              if (std::abs(A.determinant()) < 1e-14) continue;
              Eigen::Vector3d lam = A.fullPivLu().solve(Eigen::Vector3d(ip - pts[i]));
              if ((lam.array() >= 0).all() && lam.sum() <= 1.0) in = true;
            }
      if (in) {
        best = sip;
        bq = ip;
      }
    }
  }
  if (argmin) *argmin = bq;
  return best;
}

Point golden_direction(int dim, int k) {
  if (dim == 2) {
    double th = 2.0 * std::numbers::pi * std::fmod(k * kGolden, 1.0);
    return make_point(std::cos(th), std::sin(th));
  }
  if (dim == 3) {
    // additive recurrence with the plastic-number constants
    constexpr double a1 = 0.7548776662466927, a2 = 0.5698402909980532;
    double u = std::fmod(0.5 + k * a1, 1.0), v = std::fmod(0.5 + k * a2, 1.0);
    double z = 1.0 - 2.0 * u;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double th = 2.0 * std::numbers::pi * v;
    return make_point(r * std::cos(th), r * std::sin(th), z);
  }
  // Gaussian-free fallback: Halton-style coordinates normalized
  Point p(dim);
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (int i = 0; i < dim; ++i) {
    int b = primes[i % 12];
    double f = 1.0, r = 0.0;
    int n = k + 1;
    while (n > 0) {
      f /= b;
      r += f * (n % b);
      n /= b;
    }
    p[i] = 2.0 * r - 1.0;
  }
  if (p.norm() == 0.0) p[0] = 1.0;
  return p.normalized();
}

std::vector<Point> golden_directions(int dim, int n) {
  std::vector<Point> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) out.push_back(golden_direction(dim, k));
  return out;
}

}  // namespace lensbell
