#include "lensbell/gluing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

namespace lensbell {

namespace {

MeasureNode lift_node(const MartingaleNode& n) {
  MeasureNode out;
  out.mass = n.mass;
  out.value = n.value;
  if (n.leaf()) {
    out.measure = AtomicMeasure::delta(n.value);
    return out;
  }
  std::vector<Atom> atoms;
  for (const auto& c : n.children) {
    out.children.push_back(lift_node(c));
    for (const auto& a : out.children.back().measure.atoms()) atoms.push_back({a.point, c.mass * a.mass});
  }
  out.measure = AtomicMeasure(std::move(atoms));
  return out;
}

void collect_hulls(const MartingaleNode& n, std::vector<std::vector<Point>>& out) {
  if (n.leaf()) return;
  std::vector<Point> pts;
  for (const auto& c : n.children) {
    pts.push_back(c.value);
    collect_hulls(c, out);
  }
  out.push_back(std::move(pts));
}

double hulls_margin(const std::vector<std::vector<Point>>& hulls, const std::vector<ConvexBody>& bodies) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : bodies) {
    for (const auto& h : hulls) m = std::min(m, hull_min_signed_distance(b, h));
  }
  return m;
}

std::vector<ConvexBody> blends(const LensDomain& lens, double eps) {
  std::vector<ConvexBody> out;
  for (const auto& h : lens.holes()) out.push_back(ConvexBody::blend(lens.outer(), h, eps));
  return out;
}

}  // namespace

MeasureMartingale lift_to_measures(const SimpleMartingale& m) { return {lift_node(m.root)}; }

HatHole choose_hat_hole(const SimpleMartingale& m, const LensDomain& lens) {
  LensDomain closed = lens.with_closed_variant(true);
  auto rep = validate(m, closed);
  if (!rep.valid) {
    throw GluingError("not a valid martingale on the closed-hole lens: " + rep.issues.front().path + ": " +
                      rep.issues.front().message);
  }
  std::vector<std::vector<Point>> hulls;
  collect_hulls(m.root, hulls);
  if (hulls.empty()) hulls.push_back({m.root.value});

  const double tol = lens.tol();
  double top = hulls_margin(hulls, lens.holes());
  if (!(top > tol)) throw GluingError("martingale hulls touch the closure of a hole");

  // Margin grows with eps since the blends are nested; find where it vanishes.
  double lo = 0.0, hi = 1.0;
  if (hulls_margin(hulls, blends(lens, 0.0)) > tol) hi = 0.0;
  for (int it = 0; it < 40 && hi > 0.0; ++it) {
    double mid = 0.5 * (lo + hi);
    if (hulls_margin(hulls, blends(lens, mid)) > tol) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  HatHole out;
  out.critical_eps = hi;
  out.eps = hi + 0.9 * (1.0 - hi);
  out.bodies = blends(lens, out.eps);
  out.margin = hulls_margin(hulls, out.bodies);
  return out;
}

LiftReport validate_lift(const MeasureMartingale& mm, const std::vector<ConvexBody>& hat_holes, double tol) {
  LiftReport rep;
  auto issue = [&](const std::string& path, const std::string& msg) {
    rep.valid = false;
    rep.issues.push_back({path, msg});
  };
  std::function<void(const MeasureNode&, const std::string&)> walk = [&](const MeasureNode& n,
                                                                         const std::string& path) {
    if (n.leaf()) {
      if (n.measure.size() != 1 || std::abs(n.measure.total_mass() - 1.0) > tol ||
          (n.measure.atoms()[0].point - n.value).norm() > 1e-10) {
        issue(path, "leaf measure is not the delta at its value");
      }
      return;
    }
    std::vector<Atom> atoms;
    std::vector<Point> pts;
    for (const auto& c : n.children) {
      pts.push_back(c.value);
      for (const auto& a : c.measure.atoms()) atoms.push_back({a.point, c.mass * a.mass});
    }
    if (n.measure.max_mass_difference(AtomicMeasure(std::move(atoms))) > tol) {
      issue(path, "node measure is not the mixture of its children");
    }
    if ((n.measure.barycenter() - n.value).norm() > 1e-10 * (1.0 + n.value.norm())) {
      issue(path, "barycenter of the node measure differs from the node value");
    }
    for (const auto& h : hat_holes) {
      if (!(hull_min_signed_distance(h, pts) > h.boundary_tol())) {
        issue(path, "children hull meets the enlarged hole");
        break;
      }
    }
    for (size_t i = 0; i < n.children.size(); ++i) walk(n.children[i], path + "/" + std::to_string(i));
  };
  walk(mm.root, "root");
  return rep;
}

LiftReport validate_lift(const MeasureMartingale& mm, const ConvexBody& hat_hole, double tol) {
  return validate_lift(mm, std::vector<ConvexBody>{hat_hole}, tol);
}

namespace {

StepFunction arrange(const std::vector<Atom>& atoms, const std::vector<size_t>& order) {
  std::vector<double> br;
  std::vector<Point> vals;
  double acc = 0.0;
  for (size_t k : order) {
    br.push_back(acc);
    vals.push_back(atoms[k].point);
    acc += atoms[k].mass;
  }
  return StepFunction(Carrier::circle, std::move(br), std::move(vals));
}

// Cyclic word over the atoms, each atom's mass shared evenly by its copies.
StepFunction arrange_word(const std::vector<Atom>& atoms, const std::vector<size_t>& word) {
  std::vector<int> copies(atoms.size(), 0);
  for (size_t k : word) ++copies[k];
  std::vector<double> br;
  std::vector<Point> vals;
  double acc = 0.0;
  for (size_t k : word) {
    br.push_back(acc);
    vals.push_back(atoms[k].point);
    acc += atoms[k].mass / copies[k];
  }
  return StepFunction(Carrier::circle, std::move(br), std::move(vals));
}

}  // namespace

RealizationReport realize_on_circle(const SimpleMartingale& m, const LensDomain& lens,
                                    const GlueBudget& budget) {
  RealizationReport rep;
  rep.hat = choose_hat_hole(m, lens);
  AtomicMeasure law = terminal_distribution(m);

  // Angular order about the start point is tried first.
  std::vector<Atom> atoms = law.atoms();
  const Point& x0 = m.root.value;
  double total = law.total_mass();
  for (auto& a : atoms) a.mass /= total;
  if (x0.size() == 2) {
    std::stable_sort(atoms.begin(), atoms.end(), [&](const Atom& a, const Atom& b) {
      return std::atan2(a.point[1] - x0[1], a.point[0] - x0[0]) <
             std::atan2(b.point[1] - x0[1], b.point[0] - x0[0]);
    });
  }
  const size_t n = atoms.size();

  auto certify = [&](StepFunction phi, bool full) {
    MembershipOptions opts;
    opts.stop_at_first_violation = !full;
    MembershipReport r = circle_membership(phi, lens, rep.hat.bodies, opts);
    ++rep.orderings_tried;
    rep.best_margin = rep.orderings_tried == 1 ? r.margin : std::max(rep.best_margin, r.margin);
    if (r.verdict == MembershipVerdict::member) {
      rep.found = true;
      rep.function = std::move(phi);
      rep.verifier = r;
    }
    return r;
  };

  // one arc per atom
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (static_cast<int>(n) <= budget.exhaustive_atoms) {
    // Rotations are equivalent on the circle, so the first atom stays put.
    do {
      certify(arrange(atoms, order), false);
      if (rep.found || rep.orderings_tried >= budget.max_orderings) break;
    } while (n > 2 && std::next_permutation(order.begin() + 1, order.end()));
  } else {
    std::mt19937_64 rng(budget.seed);
    std::uniform_int_distribution<size_t> pick(1, n - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double cur = certify(arrange(atoms, order), true).margin;
    double temp = 0.05 * lens.outer().scale();
    for (int s = 0; s < budget.anneal_steps && !rep.found; ++s) {
      if (rep.orderings_tried >= budget.max_orderings) break;
      std::vector<size_t> next = order;
      std::swap(next[pick(rng)], next[pick(rng)]);
      double m2 = certify(arrange(atoms, next), true).margin;
      if (m2 >= cur || unit(rng) < std::exp((m2 - cur) / temp)) {
        order = next;
        cur = m2;
      }
      temp *= 0.999;
    }
  }

  // Atoms split over several arcs: closed walks through every atom on the
  // graph of pairs whose segment clears the enlarged holes, shortest first.
  // Needed when that graph has no Hamiltonian cycle.
  if (!rep.found && n > 2 && static_cast<int>(n) <= budget.exhaustive_atoms && budget.extra_arcs > 0) {
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (size_t a = 0; a < n; ++a) {
      for (size_t b = a + 1; b < n; ++b) {
        bool ok = true;
        for (const auto& h : rep.hat.bodies) {
          if (!(hull_min_signed_distance(h, {atoms[a].point, atoms[b].point}) > h.boundary_tol())) ok = false;
        }
        adj[a][b] = adj[b][a] = ok;
      }
    }
    std::vector<size_t> word{0};
    std::vector<int> seen(n, 0);
    seen[0] = 1;
    std::function<void(size_t, size_t)> walk = [&](size_t len, size_t covered) {
      if (rep.found || rep.orderings_tried >= budget.max_orderings) return;
      if (word.size() == len) {
        if (covered == n && adj[word.back()][word[0]]) certify(arrange_word(atoms, word), false);
        return;
      }
      // not enough room left for the missing atoms
      if (n - covered > len - word.size()) return;
      for (size_t k = 0; k < n && !rep.found; ++k) {
        if (!adj[word.back()][k]) continue;
        word.push_back(k);
        bool fresh = seen[k]++ == 0;
        walk(len, covered + fresh);
        --seen[k];
        word.pop_back();
      }
    };
    for (size_t len = n + 1; len <= n + static_cast<size_t>(budget.extra_arcs) && !rep.found; ++len) walk(len, 1);
  }
  if (!rep.found) {
    rep.note = rep.orderings_tried >= budget.max_orderings ? "ordering budget exhausted without a certified arrangement"
                                                            : "no certified arrangement among single-arc orders and closed walks";
  }
  if (rep.found && !distribution(*rep.function).equals(AtomicMeasure(atoms), 1e-12)) {
    rep.found = false;
    rep.function.reset();
    rep.note = "arranged function lost the terminal distribution";
  }
  return rep;
}

}  // namespace lensbell
