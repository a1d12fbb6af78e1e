#include "lensbell/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace lensbell {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

ScalarField::ScalarField(GridSpec grid, std::vector<std::uint8_t> mask)
    : grid_(grid), mask_(std::move(mask)), band_(grid.size(), 0), values_(grid.size(), kNaN) {
  if (mask_.size() != grid_.size()) throw SolverError("mask size does not match the grid");
}

bool ScalarField::reached(int i, int j) const {
  return masked(i, j) && !std::isnan(values_[grid_.index(i, j)]);
}

std::optional<double> ScalarField::interpolate(const Point& p) const {
  if (grid_.nx < 2 || grid_.ny < 2) return std::nullopt;
  double fx = (p[0] - grid_.x0) / grid_.h, fy = (p[1] - grid_.y0) / grid_.h;
  int i = std::clamp(static_cast<int>(std::floor(fx)), 0, grid_.nx - 2);
  int j = std::clamp(static_cast<int>(std::floor(fy)), 0, grid_.ny - 2);
  double tx = fx - i, ty = fy - j;
  const double eps = 1e-9;
  if (tx < -eps || tx > 1.0 + eps || ty < -eps || ty > 1.0 + eps) return std::nullopt;
  tx = std::clamp(tx, 0.0, 1.0);
  ty = std::clamp(ty, 0.0, 1.0);
  const double w[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
  const int di[4] = {0, 1, 0, 1}, dj[4] = {0, 0, 1, 1};
  double v = 0.0;
  for (int c = 0; c < 4; ++c) {
    if (w[c] <= 1e-12) continue;
    if (!reached(i + di[c], j + dj[c])) return std::nullopt;
    v += w[c] * at(i + di[c], j + dj[c]);
  }
  return v;
}

double ScalarField::sup_norm() const {
  double s = 0.0;
  for (size_t k = 0; k < values_.size(); ++k) {
    if (mask_[k] && !std::isnan(values_[k])) s = std::max(s, std::abs(values_[k]));
  }
  return s;
}

size_t ScalarField::masked_count() const { return std::count(mask_.begin(), mask_.end(), 1); }

size_t ScalarField::reached_count() const {
  size_t n = 0;
  for (size_t k = 0; k < values_.size(); ++k) n += mask_[k] && !std::isnan(values_[k]);
  return n;
}

void SolverConfig::validate() const {
  if (!(h > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (directions < 2) throw std::invalid_argument("at least two directions are needed");
  if (!(tol >= 1e-10)) throw std::invalid_argument("tolerance must be at least 1e-10");
  if (max_iterations < 1) throw std::invalid_argument("iteration cap must be positive");
  if (box && !(box->xmax > box->xmin && box->ymax > box->ymin)) throw std::invalid_argument("empty box");
}

std::vector<std::pair<int, int>> lattice_directions(int count) {
  if (count < 1) throw std::invalid_argument("direction count must be positive");
  std::vector<std::pair<int, int>> v;
  for (int r = 1; static_cast<int>(v.size()) < count; ++r) {
    v.clear();
    for (int p = 0; p <= r; ++p) {
      for (int q = -r; q <= r; ++q) {
        if (p == 0 && q <= 0) continue;
        if (std::gcd(p, std::abs(q)) == 1) v.push_back({p, q});
      }
    }
  }
  std::sort(v.begin(), v.end(), [](auto a, auto b) {
    int la = a.first * a.first + a.second * a.second, lb = b.first * b.first + b.second * b.second;
    if (la != lb) return la < lb;
    return std::atan2(a.second, a.first) < std::atan2(b.second, b.first);
  });
  v.resize(count);
  return v;
}

Box bounding_box(const LensDomain& lens, const SolverConfig& cfg) {
  if (lens.dimension() != 2) throw SolverError("the grid solver is planar");
  if (cfg.box) return *cfg.box;
  const auto& o = lens.outer();
  if (!o.bounded()) throw SolverError("unbounded outer body needs a truncation box");
  double xmax = o.support(make_point(1, 0)), xmin = -o.support(make_point(-1, 0));
  double ymax = o.support(make_point(0, 1)), ymin = -o.support(make_point(0, -1));
  return {xmin - cfg.h, ymin - cfg.h, xmax + cfg.h, ymax + cfg.h};
}

namespace {

struct Component {
  int i0, j0;
  int k0, k1;
  double tlo, thi;
  // endpoint values; NaN on a free or truncated end
  double flo, fhi;
};

struct Line {
  int dp, dq;
  std::vector<Component> comps;
};

GridSpec make_grid(const Box& b, double h) {
  GridSpec g;
  g.h = h;
  g.x0 = h * std::ceil(b.xmin / h - 1e-9);
  g.y0 = h * std::ceil(b.ymin / h - 1e-9);
  g.nx = static_cast<int>(std::floor((b.xmax - g.x0) / h + 1e-9)) + 1;
  g.ny = static_cast<int>(std::floor((b.ymax - g.y0) / h + 1e-9)) + 1;
  return g;
}

// Parameter range where origin + t dir lies in the box.
std::pair<double, double> box_range(const Box& b, const Point& o, const Point& d) {
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  const double mn[2] = {b.xmin, b.ymin}, mx[2] = {b.xmax, b.ymax};
  for (int c = 0; c < 2; ++c) {
    if (d[c] == 0.0) {
      if (o[c] < mn[c] || o[c] > mx[c]) return {1.0, 0.0};
      continue;
    }
    double a = (mn[c] - o[c]) / d[c], z = (mx[c] - o[c]) / d[c];
    if (a > z) std::swap(a, z);
    lo = std::max(lo, a);
    hi = std::min(hi, z);
  }
  return {lo, hi};
}

Line build_line_family(const LensDomain& lens, const BoundaryFunction& f, const GridSpec& g, const Box& box,
                       int dp, int dq, long& fixed_samples) {
  Line line{dp, dq, {}};
  const bool truncated = !lens.outer().bounded();
  auto inside = [&](int i, int j) { return i >= 0 && j >= 0 && i < g.nx && j < g.ny; };
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (inside(i - dp, j - dq)) continue;
      int kmax = 0;
      while (inside(i + (kmax + 1) * dp, j + (kmax + 1) * dq)) ++kmax;
      Point o = g.node(i, j);
      Point d = make_point(dp * g.h, dq * g.h);
      auto oi = lens.outer().line_interval(o, d);
      if (!oi) continue;
      double lo = oi->lo, hi = oi->hi;
      bool lo_fixed = std::isfinite(lo), hi_fixed = std::isfinite(hi);
      if (truncated) {
        auto [bl, bh] = box_range(box, o, d);
        if (bl > lo) lo = bl, lo_fixed = false;
        if (bh < hi) hi = bh, hi_fixed = false;
      }
      lo = std::max(lo, -1.0);
      hi = std::min(hi, kmax + 1.0);
      if (!(hi > lo)) continue;
      // removed parameter ranges of the holes
      std::vector<std::pair<double, double>> cuts;
      for (const auto& hole : lens.holes()) {
        auto hi_ = hole.line_interval(o, d);
        if (!hi_) continue;
        // lines grazing an open hole keep their chord
        if (!lens.closed_variant() && (hi_->hi - hi_->lo) * d.norm() < 1e-6 * hole.scale()) continue;
        cuts.push_back({hi_->lo, hi_->hi});
      }
      std::sort(cuts.begin(), cuts.end());
      double cur = lo;
      bool cur_fixed = lo_fixed && oi->lo == lo;
      auto emit = [&](double a, bool af, double b, bool bf) {
        int k0 = std::max(0, static_cast<int>(std::ceil(a - 1e-9)));
        int k1 = std::min(kmax, static_cast<int>(std::floor(b + 1e-9)));
        if (k1 < k0 && !(af && bf)) return;
        Component c{i, j, k0, k1, a, b, kNaN, kNaN};
        if (af) c.flo = f(o + a * d), ++fixed_samples;
        if (bf) c.fhi = f(o + b * d), ++fixed_samples;
        line.comps.push_back(c);
      };
      for (const auto& [a, b] : cuts) {
        if (b <= cur) continue;
        if (a >= hi) break;
        if (a > cur) emit(cur, cur_fixed, a, false);
        cur = b;
        cur_fixed = false;
      }
      if (cur < hi) emit(cur, cur_fixed, hi, hi_fixed && oi->hi == hi);
    }
  }
  return line;
}

struct HullPoint {
  double t, v;
};

// Upper concave envelope of points sorted by t.
void upper_hull(const std::vector<HullPoint>& pts, std::vector<HullPoint>& hull) {
  hull.clear();
  for (const auto& p : pts) {
    if (!hull.empty() && p.t - hull.back().t < 1e-12) {
      if (p.v > hull.back().v) hull.back().v = p.v;
      else continue;
      // re-check convexity below
      HullPoint q = hull.back();
      hull.pop_back();
      while (hull.size() >= 2) {
        const auto& a = hull[hull.size() - 2];
        const auto& b = hull.back();
        if ((b.v - a.v) * (q.t - a.t) <= (q.v - a.v) * (b.t - a.t)) hull.pop_back();
        else break;
      }
      hull.push_back(q);
      continue;
    }
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      if ((b.v - a.v) * (p.t - a.t) <= (p.v - a.v) * (b.t - a.t)) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
}

Point grad_sd(const ConvexBody& b, const Point& x) {
  double eta = 1e-7 * b.scale();
  Point g(2);
  for (int c = 0; c < 2; ++c) {
    Point e = Point::Zero(2);
    e[c] = eta;
    g[c] = (b.signed_distance(x + e) - b.signed_distance(x - e)) / (2 * eta);
  }
  return g;
}

struct TangentLine {
  size_t node;
  size_t hole;
  Point u;
  double lo, hi;
};

// Level-set tangents of the holes through x that stay clear of every hole.
std::vector<TangentLine> clear_tangents(const LensDomain& lens, const Point& x, size_t node) {
  std::vector<TangentLine> out;
  for (size_t k = 0; k < lens.holes().size(); ++k) {
    const auto& hole = lens.holes()[k];
    Point g = grad_sd(hole, x);
    if (!(g.norm() > 0.0)) continue;
    Point u = make_point(-g[1], g[0]).normalized();
    auto oi = lens.outer().line_interval(x, u);
    if (!oi || !oi->bounded()) continue;
    bool clear = true;
    for (const auto& other : lens.holes()) {
      auto hi = other.line_interval(x, u);
      if (!hi) continue;
      double a = std::max(hi->lo, oi->lo), b = std::min(hi->hi, oi->hi);
      // a tangent line meets an open hole in a numerically tiny interval
      if (lens.closed_variant() ? a <= b + lens.tol() : a < b - 1e-6 * other.scale()) {
        clear = false;
        break;
      }
    }
    if (clear) out.push_back({node, k, u, oi->lo, oi->hi});
  }
  return out;
}

double chord_value(const BoundaryFunction& f, const Point& x, const TangentLine& t) {
  double lam = t.hi / (t.hi - t.lo);
  return lam * f(x + t.lo * t.u) + (1.0 - lam) * f(x + t.hi * t.u);
}

}  // namespace

ScalarField solve_bs(const LensDomain& lens, const BoundaryFunction& f, const SolverConfig& cfg) {
  cfg.validate();
  if (!f.has(Regularity::bounded_below) && !lens.outer().bounded()) {
    throw SolverError("boundary function is not tagged bounded below");
  }
  const Box box = bounding_box(lens, cfg);
  const GridSpec g = make_grid(box, cfg.h);
  std::vector<std::uint8_t> mask(g.size(), 0), band(g.size(), 0);
  const bool truncated = !lens.outer().bounded();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      Point p = g.node(i, j);
      mask[g.index(i, j)] = lens.contains(p);
      if (truncated) {
        double m = std::min({p[0] - box.xmin, box.xmax - p[0], p[1] - box.ymin, box.ymax - p[1]});
        band[g.index(i, j)] = m < 3.0 * cfg.h;
      }
    }
  }
  ScalarField field(g, mask);
  field.set_band(band);
  std::vector<TangentLine> tangents;
  if (field.masked_count() == 0) throw SolverError("no grid node lies in the lens");

  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!field.masked(i, j)) continue;
      Point p = g.node(i, j);
      if (lens.on_fixed_boundary(p)) {
        field.at(i, j) = f(p);
      } else if (cfg.seed_tangent_chords) {
        double best = kNaN;
        for (const auto& t : clear_tangents(lens, p, g.index(i, j))) {
          double v = chord_value(f, p, t);
          if (std::isnan(best) || v > best) best = v;
          // nodes hugging a hole end every lattice line through them
          if (lens.holes()[t.hole].signed_distance(p) < 2.0 * cfg.h) tangents.push_back(t);
        }
        if (!std::isnan(best)) {
          field.at(i, j) = best;
          ++field.meta.seeded_nodes;
        }
      }
    }
  }

  auto dirs = lattice_directions(cfg.directions);
  std::vector<Line> lines;
  for (auto [p, q] : dirs) lines.push_back(build_line_family(lens, f, g, box, p, q, field.meta.boundary_samples));
  field.meta.directions = cfg.directions;

  std::vector<HullPoint> pts, hull;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    double max_up = 0.0;
    bool newly = false;
    for (const auto& line : lines) {
      for (const auto& c : line.comps) {
        pts.clear();
        if (!std::isnan(c.flo)) pts.push_back({c.tlo, c.flo});
        for (int k = c.k0; k <= c.k1; ++k) {
          int i = c.i0 + k * line.dp, j = c.j0 + k * line.dq;
          if (!field.masked(i, j)) continue;
          double v = field.at(i, j);
          if (std::isnan(v)) continue;
          if (!pts.empty() && std::abs(pts.back().t - k) < 1e-9) {
            pts.back().v = std::max(pts.back().v, v);
          } else {
            pts.push_back({static_cast<double>(k), v});
          }
        }
        if (!std::isnan(c.fhi)) {
          if (!pts.empty() && std::abs(pts.back().t - c.thi) < 1e-9) {
            pts.back().v = std::max(pts.back().v, c.fhi);
          } else {
            pts.push_back({c.thi, c.fhi});
          }
        }
        if (pts.size() < 2) continue;
        upper_hull(pts, hull);
        size_t s = 0;
        for (int k = c.k0; k <= c.k1; ++k) {
          double t = k;
          if (t < hull.front().t || t > hull.back().t) continue;
          int i = c.i0 + k * line.dp, j = c.j0 + k * line.dq;
          if (!field.masked(i, j)) continue;
          while (s + 1 < hull.size() && hull[s + 1].t < t) ++s;
          double hv;
          if (s + 1 >= hull.size()) {
            hv = hull.back().v;
          } else {
            const auto& a = hull[s];
            const auto& b = hull[s + 1];
            hv = a.v + (b.v - a.v) * (t - a.t) / (b.t - a.t);
          }
          double& cur = field.at(i, j);
          if (std::isnan(cur)) {
            cur = hv;
            newly = true;
          } else if (hv > cur) {
            max_up = std::max(max_up, hv - cur);
            cur = hv;
          }
        }
      }
    }
    // hull along the tangent line, interior values read off the grid
    for (const auto& t : tangents) {
      Point x = g.node(static_cast<int>(t.node % g.nx), static_cast<int>(t.node / g.nx));
      pts.clear();
      pts.push_back({t.lo, f(x + t.lo * t.u)});
      for (int k = static_cast<int>(std::floor(t.lo / g.h)) + 1; k * g.h < t.hi; ++k) {
        double s = k * g.h, v;
        if (k == 0) {
          v = field.values()[t.node];
          if (std::isnan(v)) continue;
        } else {
          auto iv = field.interpolate(x + s * t.u);
          if (!iv) continue;
          v = *iv;
        }
        pts.push_back({s, v});
      }
      pts.push_back({t.hi, f(x + t.hi * t.u)});
      upper_hull(pts, hull);
      size_t s = 0;
      while (s + 1 < hull.size() && hull[s + 1].t < 0.0) ++s;
      if (s + 1 >= hull.size()) continue;
      const auto& a = hull[s];
      const auto& b = hull[s + 1];
      double hv = a.v + (b.v - a.v) * (0.0 - a.t) / (b.t - a.t);
      double& cur = field.values()[t.node];
      if (std::isnan(cur)) {
        cur = hv;
        newly = true;
      } else if (hv > cur) {
        max_up = std::max(max_up, hv - cur);
        cur = hv;
      }
    }
    field.meta.iterations = it + 1;
    field.meta.last_update = max_up;
    field.meta.updates.push_back(newly ? std::numeric_limits<double>::infinity() : max_up);
    if (!newly && max_up < cfg.tol) {
      field.meta.converged = true;
      break;
    }
  }
  return field;
}

ConcavityReport check_local_concavity(const Evaluator& value, const LensDomain& lens, const Box& box, double h,
                                      double scale, const ConcavityOptions& opts) {
  ConcavityReport rep;
  const double thr = opts.tol * (1.0 + scale);
  const double ts[3] = {0.25, 0.5, 0.75};
  auto check = [&](const Point& a, const Point& b) {
    if (!lens.segment_inside(a, b)) return;
    auto va = value(a), vb = value(b);
    if (!va || !vb) {
      ++rep.skipped;
      return;
    }
    ++rep.segments;
    for (double t : ts) {
      auto vt = value(t * a + (1 - t) * b);
      if (!vt) continue;
      double defect = t * *va + (1 - t) * *vb - *vt;
      rep.worst_defect = std::max(rep.worst_defect, defect);
      if (defect > thr) {
        rep.passed = false;
        if (rep.violations.size() < opts.max_violations) rep.violations.push_back({a, b, t, defect});
      }
    }
  };
  if (opts.node_segments) {
    const double r = std::numbers::sqrt2 / 2;
    const Point dirs[4] = {make_point(1, 0), make_point(0, 1), make_point(r, r),
                           make_point(r, -r)};
    int nx = static_cast<int>(std::floor((box.xmax - box.xmin) / h + 1e-9)) + 1;
    int ny = static_cast<int>(std::floor((box.ymax - box.ymin) / h + 1e-9)) + 1;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        Point x = make_point(box.xmin + i * h, box.ymin + j * h);
        if (!lens.contains(x)) continue;
        for (const auto& u : dirs) check(x - 2 * h * u, x + 2 * h * u);
      }
    }
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> ux(box.xmin, box.xmax), uy(box.ymin, box.ymax), ang(0, 2 * std::numbers::pi);
  const double diag = std::hypot(box.xmax - box.xmin, box.ymax - box.ymin);
  std::uniform_real_distribution<double> len(2 * h, std::max(2 * h, 0.25 * diag));
  for (int s = 0; s < opts.random_segments; ++s) {
    Point a = make_point(ux(rng), uy(rng));
    double th = ang(rng), l = len(rng);
    Point b = a + l * make_point(std::cos(th), std::sin(th));
    if (!lens.contains(a)) continue;
    check(a, b);
  }
  return rep;
}

ConcavityReport check_local_concavity(const ScalarField& field, const LensDomain& lens,
                                      const ConcavityOptions& opts) {
  const auto& g = field.grid();
  Box box{g.x0, g.y0, g.x0 + (g.nx - 1) * g.h, g.y0 + (g.ny - 1) * g.h};
  Evaluator ev = [&](const Point& p) -> std::optional<double> {
    double fx = std::round((p[0] - g.x0) / g.h), fy = std::round((p[1] - g.y0) / g.h);
    int i = static_cast<int>(fx), j = static_cast<int>(fy);
    if (i >= 0 && j >= 0 && i < g.nx && j < g.ny && field.band()[g.index(i, j)] &&
        std::abs(p[0] - g.node(i, j)[0]) < 0.5 * g.h && std::abs(p[1] - g.node(i, j)[1]) < 0.5 * g.h) {
      return std::nullopt;
    }
    return field.interpolate(p);
  };
  return check_local_concavity(ev, lens, box, g.h, field.sup_norm(), opts);
}

DomainComparison compare_domains(const LensDomain& lens, const BoundaryFunction& f, const SolverConfig& cfg) {
  DomainComparison out;
  out.open_field = solve_bs(lens.with_closed_variant(false), f, cfg);
  out.closed_field = solve_bs(lens.with_closed_variant(true), f, cfg);
  const auto& g = out.open_field.grid();
  out.where = Point::Zero(2);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!out.closed_field.reportable(i, j) || !out.open_field.reportable(i, j)) continue;
      if (!out.closed_field.reached(i, j) || !out.open_field.reached(i, j)) continue;
      ++out.common_nodes;
      double d = std::abs(out.open_field.at(i, j) - out.closed_field.at(i, j));
      if (d > out.sup_difference) {
        out.sup_difference = d;
        out.where = g.node(i, j);
      }
    }
  }
  return out;
}

Continuation free_boundary_continuation(const ScalarField& field, const LensDomain& lens, const Point& x,
                                        const std::optional<Point>& dir) {
  int hole = lens.free_boundary_hole(x);
  if (hole < 0) throw SolverError("point is not on the free boundary");
  Point u;
  double reach;
  if (dir) {
    u = dir->normalized();
    if (u.dot(lens.holes()[hole].normal(x)) <= 0.0) throw SolverError("direction points into the hole");
    auto oi = lens.outer().line_interval(x, u);
    reach = oi ? oi->hi : 0.0;
    for (const auto& h : lens.holes()) {
      auto hi = h.line_interval(x, u);
      if (hi && hi->lo > 1e-12) reach = std::min(reach, hi->lo);
    }
  } else {
    Segment s = transversal_segment(lens, x);
    u = (s.b - s.a).normalized();
    if ((s.a - x).norm() > (s.b - x).norm()) u = -u;
    reach = s.length();
  }
  const double h = field.grid().h;
  for (int k = 1; (k + 1) * h < reach; ++k) {
    auto v1 = field.interpolate(x + k * h * u);
    if (!v1) continue;
    auto v2 = field.interpolate(x + (k + 1) * h * u);
    if (!v2) continue;
    Continuation c;
    c.s1 = k * h;
    c.s2 = (k + 1) * h;
    c.value = *v1 - (*v2 - *v1) * c.s1 / (c.s2 - c.s1);
    return c;
  }
  throw SolverError("no interpolable nodes along the transversal");
}

}  // namespace lensbell
