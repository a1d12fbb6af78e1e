#include "lensbell/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace lensbell {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::superdifferential: return "superdifferential";
    case Provenance::perturbed: return "perturbed";
    case Provenance::tangent: return "tangent";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct TPoint {
  double t, v;
};

std::vector<TPoint> upper_hull(std::vector<TPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const TPoint& a, const TPoint& b) { return a.t < b.t; });
  std::vector<TPoint> h;
  for (const auto& p : pts) {
    if (!h.empty() && std::abs(p.t - h.back().t) < 1e-12) {
      if (p.v <= h.back().v) continue;
      h.pop_back();
    }
    while (h.size() >= 2) {
      const auto& a = h[h.size() - 2];
      const auto& b = h.back();
      if ((b.v - a.v) * (p.t - a.t) <= (p.v - a.v) * (b.t - a.t)) h.pop_back();
      else break;
    }
    h.push_back(p);
  }
  return h;
}

std::optional<double> hull_at(const std::vector<TPoint>& h, double t) {
  if (h.empty() || t < h.front().t || t > h.back().t) return std::nullopt;
  for (size_t k = 0; k + 1 < h.size(); ++k) {
    if (t <= h[k + 1].t) return h[k].v + (h[k + 1].v - h[k].v) * (t - h[k].t) / (h[k + 1].t - h[k].t);
  }
  return h.back().v;
}

Box grid_box(const GridSpec& g) { return {g.x0, g.y0, g.x0 + (g.nx - 1) * g.h, g.y0 + (g.ny - 1) * g.h}; }

double slope_fit(const std::vector<std::pair<double, double>>& xy) {
  double n = static_cast<double>(xy.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : xy) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

}  // namespace

SuperdiffReport superdifferential_at(const ScalarField& field, const LensDomain& lens, const BoundaryFunction& f,
                                     const Point& x, const SuperdiffOptions& opts) {
  if (lens.dimension() != 2) throw ExtensionError("superdifferentials are computed in the plane");
  int k = lens.free_boundary_hole(x);
  if (k < 0) throw ExtensionError("point is not on the free boundary");
  const ConvexBody& hole = lens.holes()[k];
  Point n = hole.normal(x);
  Point tau = make_point(-n[1], n[0]);
  SuperdiffReport rep;
  rep.continuation = free_boundary_continuation(field, lens, x).value;

  // the tangent section through x, cut at other holes
  auto oi = lens.outer().line_interval(x, tau);
  if (!oi || !oi->bounded()) throw ExtensionError("tangent section is unbounded");
  double lo = oi->lo, hi = oi->hi;
  bool lo_fixed = true, hi_fixed = true;
  for (size_t j = 0; j < lens.holes().size(); ++j) {
    if (static_cast<int>(j) == k) continue;
    auto c = lens.holes()[j].line_interval(x, tau);
    if (!c) continue;
    if (c->lo > 0 && c->lo < hi) hi = c->lo, hi_fixed = false;
    if (c->hi < 0 && c->hi > lo) lo = c->hi, lo_fixed = false;
  }
  const double h = field.grid().h;
  std::vector<TPoint> pts;
  if (lo_fixed) pts.push_back({lo, f(x + lo * tau)});
  if (hi_fixed) pts.push_back({hi, f(x + hi * tau)});
  for (int s = static_cast<int>(std::ceil(lo / h)); s * h <= hi; ++s) {
    if (std::abs(s) < 1) continue;
    auto v = field.interpolate(x + s * h * tau);
    if (v) pts.push_back({s * h, *v});
  }
  double bx = rep.continuation;
  if (auto v0 = hull_at(upper_hull(pts), 0.0)) bx = std::max(bx, *v0);
  pts.push_back({0.0, bx});
  auto hull = upper_hull(pts);
  std::vector<double> slopes;
  for (size_t i = 0; i < hull.size(); ++i) {
    if (std::abs(hull[i].t) > 1e-12) continue;
    if (i > 0) slopes.push_back((hull[i].v - hull[i - 1].v) / (hull[i].t - hull[i - 1].t));
    if (i + 1 < hull.size()) slopes.push_back((hull[i + 1].v - hull[i].v) / (hull[i + 1].t - hull[i].t));
  }
  // collinear neighbours drop the vertex at 0; use the segment across it
  for (size_t i = 0; slopes.empty() && i + 1 < hull.size(); ++i) {
    if (hull[i].t < 0.0 && hull[i + 1].t > 0.0) slopes.push_back((hull[i + 1].v - hull[i].v) / (hull[i + 1].t - hull[i].t));
  }
  rep.ell = 0.0;
  for (double s : slopes) rep.ell += s / slopes.size();

  double a = -kInf;
  for (const auto& y : sample_boundary(lens.outer(), opts.boundary_samples)) {
    double depth = (y - x).dot(n);
    if (depth <= opts.min_depth) continue;
    if (!lens.segment_inside(x, y)) continue;
    ++rep.visible_samples;
    double r = (f(y) - bx - rep.ell * (y - x).dot(tau)) / depth;
    if (r > a) {
      a = r;
      rep.contact = y;
    }
  }
  if (rep.visible_samples == 0) throw ExtensionError("no visible fixed-boundary point below the tangent");
  if (!std::isfinite(a)) throw ExtensionError("unbounded normal coefficient");
  rep.a = a;
  rep.functional = {rep.ell * tau + a * n, bx, x, Provenance::superdifferential};
  return rep;
}

SupportCheck check_supporting(const ScalarField& field, const LensDomain& lens, const LinearFunctional& L,
                              int n_points, std::uint64_t seed) {
  SupportCheck out;
  out.worst_excess = -kInf;
  Box b = grid_box(field.grid());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(b.xmin, b.xmax), uy(b.ymin, b.ymax);
  for (long tries = 0; out.points < n_points && tries < 200L * n_points; ++tries) {
    Point y = make_point(ux(rng), uy(rng));
    if (!lens.contains(y) || !lens.segment_inside(L.anchor, y)) continue;
    auto v = field.interpolate(y);
    if (!v) continue;
    ++out.points;
    double e = *v - L(y);
    if (e > out.worst_excess) {
      out.worst_excess = e;
      out.worst = y;
    }
  }
  return out;
}

double Perturbation::g(const Point& x) const { return 1.0 - (x - center).squaredNorm() / (radius * radius); }

Point Perturbation::grad_g(const Point& x) const { return -2.0 * (x - center) / (radius * radius); }

LinearFunctional Perturbation::lift(const LinearFunctional& L) const {
  return {L.coeffs + eps * grad_g(L.anchor), L.value + eps * g(L.anchor), L.anchor, Provenance::perturbed};
}

Perturbation strong_concavity_perturb(const ScalarField& field, const LensDomain& lens, double eps) {
  if (!lens.outer().bounded()) throw ExtensionError("the perturbation needs a bounded lens");
  if (eps < 0.0) throw ExtensionError("eps must be nonnegative");
  const auto& o = lens.outer();
  double xmax = o.support(make_point(1, 0)), xmin = -o.support(make_point(-1, 0));
  double ymax = o.support(make_point(0, 1)), ymin = -o.support(make_point(0, -1));
  Perturbation p;
  p.center = make_point(0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
  p.radius = 0.5 * std::hypot(xmax - xmin, ymax - ymin);
  p.eps = eps;
  p.field = field;
  const auto& g = field.grid();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (field.reached(i, j)) p.field.at(i, j) += eps * p.g(g.node(i, j));
    }
  }
  return p;
}

namespace {

struct FreeSample {
  Point y;
  LinearFunctional L;  // anchored at y, value G(y)
};

std::vector<FreeSample> free_samples(const ScalarField& base, const Perturbation* pert, const LensDomain& lens,
                                     const BoundaryFunction& f, int n, const SuperdiffOptions& opts) {
  std::vector<FreeSample> out;
  for (const auto& hole : lens.holes()) {
    for (const auto& y : sample_boundary(hole, n)) {
      if (lens.free_boundary_hole(y) < 0) continue;
      try {
        auto sd = superdifferential_at(base, lens, f, y, opts);
        out.push_back({y, pert ? pert->lift(sd.functional) : sd.functional});
      } catch (const std::exception&) {
        // points whose transversal has no interpolable nodes are skipped
      }
    }
  }
  return out;
}

}  // namespace

DecayFit fit_decay_constant(const Perturbation& pert, const LensDomain& lens, const BoundaryFunction& f,
                            int n_points, double max_distance, const SuperdiffOptions& opts) {
  // base field: undo the perturbation on reached nodes
  ScalarField base = pert.field;
  const auto& g = base.grid();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (base.reached(i, j)) base.at(i, j) -= pert.eps * pert.g(g.node(i, j));
    }
  }
  auto S = free_samples(base, &pert, lens, f, n_points, opts);
  DecayFit fit;
  fit.c = kInf;
  for (size_t i = 0; i < S.size(); ++i) {
    for (size_t j = 0; j < S.size(); ++j) {
      if (i == j) continue;
      double r = (S[i].y - S[j].y).norm();
      if (r <= 0.0 || r > max_distance) continue;
      double c = (S[i].L(S[j].y) - S[j].L.value) / (r * r);
      fit.c = std::min(fit.c, c);
      ++fit.pairs;
    }
  }
  if (fit.pairs == 0) fit.c = 0.0;
  return fit;
}

namespace {

// Minimum of the sampled functionals visible from z in the given lens.
std::optional<std::pair<double, size_t>> lower_envelope(const std::vector<FreeSample>& S, const LensDomain& lens,
                                                        const Point& z, double reach = kInf) {
  std::optional<std::pair<double, size_t>> best;
  for (size_t k = 0; k < S.size(); ++k) {
    if ((S[k].y - z).norm() > reach) continue;
    double v = S[k].L(z);
    if (best && v >= best->first) continue;
    if (!lens.segment_inside(z, S[k].y)) continue;
    best = {v, k};
  }
  return best;
}

GridSpec aligned_grid(const Box& b, double h) {
  GridSpec g;
  g.h = h;
  g.x0 = h * std::ceil(b.xmin / h - 1e-9);
  g.y0 = h * std::ceil(b.ymin / h - 1e-9);
  g.nx = static_cast<int>(std::floor((b.xmax - g.x0) / h + 1e-9)) + 1;
  g.ny = static_cast<int>(std::floor((b.ymax - g.y0) / h + 1e-9)) + 1;
  return g;
}

}  // namespace

ExtensionResult extend_through_free(const ScalarField& field, const LensDomain& lens, const BoundaryFunction& f,
                                    double eps, const ExtensionConfig& cfg) {
  if (!lens.outer().bounded()) throw ExtensionError("extension needs a bounded lens");
  auto pert = std::make_shared<Perturbation>(strong_concavity_perturb(field, lens, eps));
  auto S = std::make_shared<std::vector<FreeSample>>(
      free_samples(field, pert.get(), lens, f, cfg.free_samples, cfg.superdiff));
  if (S->empty()) throw ExtensionError("no usable free-boundary samples");

  double hole_scale = 0.0;
  for (const auto& h : lens.holes()) hole_scale = std::max(hole_scale, h.scale());
  const double reach = cfg.reach * hole_scale;
  std::vector<double> levels = cfg.shrinks;
  std::sort(levels.begin(), levels.end());
  const GridSpec& g = field.grid();
  // Nodes within h of the free boundary only see near-tangent lattice
  // chords; they are raised to the linear profile between the one-sided
  // boundary limit and the field 2h further in.
  auto G = std::make_shared<ScalarField>(pert->field);
  int regularized = 0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!field.masked(i, j)) continue;
      Point z = g.node(i, j);
      for (const auto& hole : lens.holes()) {
        double sd = hole.signed_distance(z);
        if (sd < -hole.boundary_tol() || sd >= g.h) continue;
        Point n = hole.normal(z);
        Point p = z - std::max(sd, 0.0) * n;
        auto q = pert->field.interpolate(p + 2.0 * g.h * n);
        if (!q) continue;
        try {
          double bp = superdifferential_at(field, lens, f, p, cfg.superdiff).functional.value + eps * pert->g(p);
          double t = std::max(sd, 0.0) / (2.0 * g.h);
          double v = (1.0 - t) * bp + t * *q;
          if (!(G->at(i, j) >= v)) {
            G->at(i, j) = v;
            ++regularized;
          }
        } catch (const std::exception&) {
        }
      }
    }
  }
  ExtensionResult last{false, lens, {}, {}, 0.0, {}, {}, {}, ""};
  for (double s : levels) {
    if (!(s > 0.0 && s < 1.0)) throw ExtensionError("shrink levels must lie in (0,1)");
    std::vector<ConvexBody> holes;
    for (const auto& h : lens.holes()) holes.push_back(ConvexBody::homothety(h, h.interior_point(), s));
    LensDomain ext = lens.with_holes(holes);
    std::vector<std::uint8_t> mask(g.size(), 0);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) mask[g.index(i, j)] = ext.contains(g.node(i, j));
    }
    ScalarField out(g, mask);
    std::vector<Witness> wit;
    long missing = 0;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (!mask[g.index(i, j)]) continue;
        if (field.masked(i, j)) {
          out.at(i, j) = G->at(i, j);
          continue;
        }
        Point z = g.node(i, j);
        if (auto e = lower_envelope(*S, ext, z, reach)) {
          out.at(i, j) = e->first;
          if (wit.size() < 64) wit.push_back({z, (*S)[e->second].y, (*S)[e->second].L});
        } else {
          ++missing;
        }
      }
    }
    ConcavityOptions co = cfg.concavity;
    co.tol = cfg.concavity_tol;
    ExtensionResult res{false, ext, out, {}, s, {}, check_local_concavity(out, ext, co), std::move(wit), ""};
    for (double t : levels) {
      res.tried.push_back(t);
      if (t == s) break;
    }
    auto orig = std::make_shared<LensDomain>(lens);
    auto extp = std::make_shared<LensDomain>(ext);
    res.value = [G, S, orig, extp, reach](const Point& z) -> std::optional<double> {
      if (orig->contains(z)) return G->interpolate(z);
      if (!extp->contains(z)) return std::nullopt;
      auto e = lower_envelope(*S, *extp, z, reach);
      if (!e) return std::nullopt;
      return e->first;
    };
    if (missing > 0) {
      res.note = std::to_string(missing) + " new nodes see no free-boundary sample at level " + std::to_string(s);
      last = std::move(res);
      continue;
    }
    if (res.concavity.passed) {
      res.ok = true;
      res.note = "shrink " + std::to_string(s) + " passed the concavity sweep; " + std::to_string(regularized) +
                 " free-boundary nodes regularized";
      return res;
    }
    res.note = "no shrink level passed; last failure at level " + std::to_string(s);
    last = std::move(res);
  }
  return last;
}

ExtensionResult extend_through_fixed(const ScalarField& field, const LensDomain& lens, double outer_margin,
                                     const ExtensionConfig& cfg) {
  const auto& outer = lens.outer();
  if (!outer.bounded()) throw ExtensionError("extension needs a bounded lens");
  if (!(outer_margin > 0.0)) throw ExtensionError("outer margin must be positive");
  ConvexBody inflated = ConvexBody::inflation(outer, outer_margin);

  double gap = kInf;
  for (const auto& h : lens.holes()) {
    for (const auto& p : sample_boundary(h, 256)) gap = std::min(gap, -outer.signed_distance(p));
  }
  Point c = outer.interior_point();
  double rho = 0.0;
  for (const auto& p : sample_boundary(outer, 512)) rho = std::max(rho, (p - c).norm());
  double delta = 0.25 * gap;
  std::optional<ConvexBody> inner;
  for (int it = 0; it < 20 && !inner; ++it, delta *= 0.5) {
    ConvexBody cand = ConvexBody::homothety(outer, c, 1.0 - delta / rho);
    bool ok = true;
    for (const auto& h : lens.holes()) {
      for (const auto& p : sample_boundary(h, 256)) ok = ok && cand.signed_distance(p) < -cand.boundary_tol();
    }
    if (ok) inner = cand;
  }
  if (!inner) throw ExtensionError("could not fit an inner body around the holes");

  // tangent functionals from central differences of the field on the inner boundary
  const double h = field.grid().h;
  auto S = std::make_shared<std::vector<FreeSample>>();
  for (const auto& y : sample_boundary(*inner, cfg.fixed_samples)) {
    auto v = field.interpolate(y);
    auto vx1 = field.interpolate(y + make_point(h, 0)), vx0 = field.interpolate(y - make_point(h, 0));
    auto vy1 = field.interpolate(y + make_point(0, h)), vy0 = field.interpolate(y - make_point(0, h));
    if (!v || !vx1 || !vx0 || !vy1 || !vy0) continue;
    Point grad = make_point((*vx1 - *vx0) / (2 * h), (*vy1 - *vy0) / (2 * h));
    S->push_back({y, {grad, *v, y, Provenance::tangent}});
  }
  if (S->empty()) throw ExtensionError("no interpolable points on the inner body");

  LensDomain ext(inflated, lens.holes(), lens.closed_variant());
  double xmax = inflated.support(make_point(1, 0)), xmin = -inflated.support(make_point(-1, 0));
  double ymax = inflated.support(make_point(0, 1)), ymin = -inflated.support(make_point(0, -1));
  GridSpec g = aligned_grid({xmin - h, ymin - h, xmax + h, ymax + h}, h);
  const GridSpec& g0 = field.grid();
  std::vector<std::uint8_t> mask(g.size(), 0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) mask[g.index(i, j)] = ext.contains(g.node(i, j));
  }
  ScalarField out(g, mask);
  std::vector<Witness> wit;
  auto inner_p = std::make_shared<ConvexBody>(*inner);
  auto in_core = [inner_p](const Point& z) { return inner_p->signed_distance(z) <= inner_p->boundary_tol(); };
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!mask[g.index(i, j)]) continue;
      Point z = g.node(i, j);
      if (in_core(z)) {
        int i0 = static_cast<int>(std::lround((z[0] - g0.x0) / h)), j0 = static_cast<int>(std::lround((z[1] - g0.y0) / h));
        if (i0 >= 0 && j0 >= 0 && i0 < g0.nx && j0 < g0.ny && field.reached(i0, j0)) out.at(i, j) = field.at(i0, j0);
        continue;
      }
      if (auto e = lower_envelope(*S, ext, z)) {
        out.at(i, j) = e->first;
        if (wit.size() < 64) wit.push_back({z, (*S)[e->second].y, (*S)[e->second].L});
      }
    }
  }
  ConcavityOptions co = cfg.concavity;
  co.tol = cfg.concavity_tol;
  ExtensionResult res{false, ext, out, {}, outer_margin, {outer_margin}, check_local_concavity(out, ext, co),
                      std::move(wit), ""};
  auto extp = std::make_shared<LensDomain>(ext);
  auto base = std::make_shared<ScalarField>(field);
  res.value = [base, S, extp, in_core](const Point& z) -> std::optional<double> {
    if (!extp->contains(z)) return std::nullopt;
    if (in_core(z)) return base->interpolate(z);
    auto e = lower_envelope(*S, *extp, z);
    if (!e) return std::nullopt;
    return e->first;
  };
  size_t unreached = out.masked_count() - out.reached_count();
  res.ok = res.concavity.passed && unreached == 0;
  res.note = "inner body offset " + std::to_string(delta * 2.0) + ", unreached nodes " + std::to_string(unreached);
  return res;
}

RegressionReport boundary_regression(const ScalarField& field, const LensDomain& lens, const BoundaryFunction& f,
                                     int n_points, const SuperdiffOptions& opts) {
  if (!f.has(Regularity::c2)) throw ExtensionError("regression needs a C2 boundary function");
  struct Sample {
    Point x;
    SuperdiffReport sd;
  };
  std::vector<Sample> S;
  for (const auto& hole : lens.holes()) {
    for (const auto& y : sample_boundary(hole, n_points)) {
      if (lens.free_boundary_hole(y) < 0) continue;
      try {
        S.push_back({y, superdifferential_at(field, lens, f, y, opts)});
      } catch (const std::exception&) {
      }
    }
  }
  RegressionReport rep;
  if (S.size() < 4) throw ExtensionError("insufficient usable free-boundary points");
  const double floor = 1e-12;
  std::vector<std::pair<double, double>> free_xy, contact_xy;
  for (size_t i = 0; i < S.size(); ++i) {
    const auto& L = S[i].sd.functional;
    for (size_t j = 0; j < S.size(); ++j) {
      if (i == j) continue;
      double r = (S[i].x - S[j].x).norm();
      if (r > 0.5) continue;
      double gap = S[j].sd.functional.value - L(S[j].x);
      rep.max_gap = std::max(rep.max_gap, std::abs(gap));
      if (gap > floor) free_xy.push_back({std::log(r), std::log(gap)});
    }
    // contact: L majorizes f on visible fixed-boundary points near e_x
    const Point& e = S[i].sd.contact;
    for (const auto& z : sample_boundary(lens.outer(), 2048)) {
      double r = (z - e).norm();
      if (r <= 1e-9 || r > 0.3) continue;
      if (!lens.segment_inside(S[i].x, z)) continue;
      double gap = L(z) - f(z);
      if (gap > floor) contact_xy.push_back({std::log(r), std::log(gap)});
    }
  }
  rep.free_pairs = static_cast<int>(free_xy.size());
  rep.contact_points = static_cast<int>(contact_xy.size());
  if (rep.max_gap < 1e-9 || free_xy.size() < 8) {
    rep.degenerate = true;
    rep.note = "free-boundary gaps vanish; regression skipped";
  } else {
    rep.free_exponent = slope_fit(free_xy);
  }
  if (contact_xy.size() >= 8) rep.contact_exponent = slope_fit(contact_xy);
  return rep;
}

}  // namespace lensbell
