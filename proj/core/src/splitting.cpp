#include "lensbell/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

namespace lensbell {

void SplitConfig::validate(size_t pieces) const {
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("shrink must lie in (0,1)");
  if (resolution < 16) throw std::invalid_argument("resolution must be at least 16");
  if (!(slack >= 1.0)) throw std::invalid_argument("slack must be at least 1");
  int need = static_cast<int>(std::ceil(std::log2(std::max<size_t>(pieces, 1))));
  if (max_depth < need) throw std::invalid_argument("max depth below log2 of the piece count");
}

std::vector<ConvexBody> shrink_holes(const LensDomain& lens, double shrink) {
  std::vector<ConvexBody> out;
  for (const auto& h : lens.holes()) out.push_back(ConvexBody::homothety(h, h.interior_point(), shrink));
  return out;
}

namespace {

double clearance(const std::vector<ConvexBody>& bodies, const Point& a, const Point& b) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& h : bodies) m = std::min(m, segment_min_signed_distance(h, a, b).first);
  return m;
}

double tol_of(const std::vector<ConvexBody>& bodies) {
  double t = 0.0;
  for (const auto& h : bodies) t = std::max(t, h.boundary_tol());
  return t;
}

// Relative split positions allowed at every node, whatever the local bound.
constexpr double kBaseRatio = 1.049;

using Intervals = std::vector<std::pair<double, double>>;

Intervals merge(Intervals iv) {
  std::sort(iv.begin(), iv.end());
  Intervals out;
  for (const auto& [a, b] : iv) {
    if (!out.empty() && a <= out.back().second + 1e-15) {
      out.back().second = std::max(out.back().second, b);
    } else {
      out.push_back({a, b});
    }
  }
  return out;
}

// reach[k]: relative breakpoint positions that a chain of k near-midpoint
// splits turns into an exact split point.
const std::vector<Intervals>& reach_table() {
  static const std::vector<Intervals> table = [] {
    const double lo = 1.0 / (1.0 + kBaseRatio), hi = kBaseRatio / (1.0 + kBaseRatio);
    std::vector<Intervals> t{{{lo, hi}}};
    for (int k = 1; k < 64; ++k) {
      Intervals next = t.back();
      for (const auto& [a, b] : t.back()) {
        next.push_back({lo * a, std::min(hi * b, hi)});
        next.push_back({std::max(lo + (1.0 - lo) * a, lo), hi + (1.0 - hi) * b});
      }
      t.push_back(merge(std::move(next)));
    }
    return t;
  }();
  return table;
}

int reach_steps(double p) {
  const auto& t = reach_table();
  for (size_t k = 0; k < t.size(); ++k) {
    for (const auto& [a, b] : t[k]) {
      if (p > a && p < b) return static_cast<int>(k);
    }
  }
  return -1;
}

// Relative split position that moves the breakpoint at relative position p
// one table level closer; nullopt when p is beyond the table.
std::optional<double> steer(double p) {
  int k = reach_steps(p);
  const double lo = 1.0 / (1.0 + kBaseRatio), hi = kBaseRatio / (1.0 + kBaseRatio);
  if (k < 0) return p < 0.5 ? lo : hi;
  if (k == 0) return p;
  for (const auto& [a, b] : reach_table()[k - 1]) {
    // breakpoint ends up in the left child at p / tau
    double l1 = std::max({lo, p / b, p}), h1 = std::min(hi, p / a);
    if (l1 < h1) return 0.5 * (l1 + h1);
    // or in the right child at (p - tau) / (1 - tau)
    double l2 = std::max(lo, (p - b) / (1.0 - b)), h2 = std::min({hi, (p - a) / (1.0 - a), p});
    if (l2 < h2) return 0.5 * (l2 + h2);
  }
  return std::nullopt;
}

}  // namespace

SplitChoice split_interval(const StepFunction& phi, double s, double e,
                           const std::vector<ConvexBody>& shrunk_holes, double bound,
                           const SplitConfig& cfg) {
  if (!(e > s)) throw ClassError("split of a degenerate interval");
  size_t first = phi.piece_at(s), last = phi.piece_at(std::nextafter(e, s));
  if (first == last) return {0.5 * (s + e), 1.0, std::numeric_limits<double>::infinity()};

  // candidate classes: 0 breakpoints, 1..64 steering points ranked by the
  // number of further splits they need, 100 grid and mass midpoint
  std::vector<std::pair<int, double>> cands;
  const double len = e - s;
  for (size_t k = first + 1; k <= last; ++k) {
    double b = phi.start(k);
    cands.push_back({0, b});
    double p = (b - s) / len;
    if (auto tau = steer(p)) {
      int steps = reach_steps(p);
      cands.push_back({steps < 0 ? 99 : steps, s + *tau * len});
    }
  }
  cands.push_back({100, 0.5 * (s + e)});
  for (int k = 1; k < cfg.resolution; ++k) cands.push_back({100, s + len * k / cfg.resolution});

  const double tol = tol_of(shrunk_holes);
  const double limit = bound * cfg.slack;
  std::optional<SplitChoice> best_any;
  std::optional<std::pair<int, SplitChoice>> best;
  for (auto [cls, t] : cands) {
    if (!(t > s && t < e)) continue;
    double l = t - s, r = e - t;
    double ratio = std::max(l / r, r / l);
    Point al = average(phi, s, t), ar = average(phi, t, e);
    double m = clearance(shrunk_holes, al, ar);
    SplitChoice c{t, ratio, m};
    if (!best_any || m > best_any->margin) best_any = c;
    if (!(m > tol) || ratio > limit) continue;
    bool better = !best || cls < best->first;
    if (best && cls == best->first) {
      better = cls == 100 ? m > best->second.margin : ratio < best->second.ratio;
    }
    if (better) best = {cls, c};
  }
  if (!best) throw SplitError("no admissible split point", s, e, best_any);
  return best->second;
}

SplitResult build_martingale(const StepFunction& phi_in, const LensDomain& lens, const SplitConfig& cfg,
                             const BoundaryFunction& f) {
  if (phi_in.carrier() != Carrier::interval) throw ClassError("splitting needs an interval carrier");
  StepFunction phi = phi_in.merged(0.0);
  cfg.validate(phi.pieces());
  auto mem = interval_membership(phi, lens);
  if (mem.verdict == MembershipVerdict::violated) throw ClassError("function is not admissible");

  auto shrunk = shrink_holes(lens, cfg.shrink);
  SplitResult res{SimpleMartingale{}, {}, lens.with_holes(shrunk).with_closed_variant(true), 0.0, 0.0};

  std::function<MartingaleNode(double, double, double, int, std::vector<size_t>&)> rec =
      [&](double s, double e, double mass, int depth, std::vector<size_t>& path) {
        MartingaleNode node;
        node.mass = mass;
        size_t first = phi.piece_at(s), last = phi.piece_at(std::nextafter(e, s));
        if (first == last) {
          node.value = phi.values()[first];
          return node;
        }
        if (depth >= cfg.max_depth) throw SplitError("depth cap exceeded", s, e, std::nullopt);
        node.value = average(phi, s, e);
        double bound = delta(lens, shrunk, node.value, cfg.delta_samples);
        SplitChoice c = split_interval(phi, s, e, shrunk, bound, cfg);
        res.trace.push_back({path, s, e, node.value, c.t, c.ratio, bound, depth});
        path.push_back(0);
        node.children.push_back(rec(s, c.t, (c.t - s) / (e - s), depth + 1, path));
        path.back() = 1;
        node.children.push_back(rec(c.t, e, (e - c.t) / (e - s), depth + 1, path));
        path.pop_back();
        return node;
      };
  std::vector<size_t> path;
  res.martingale.root = rec(0.0, 1.0, 1.0, 0, path);
  res.expected = expected_payoff(res.martingale, f);
  res.payoff = payoff(phi, f);
  return res;
}

}  // namespace lensbell
