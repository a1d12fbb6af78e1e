#include "lensbell/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace lensbell {

SimpleMartingale SimpleMartingale::constant(Point value) {
  SimpleMartingale m;
  m.root.mass = 1.0;
  m.root.value = std::move(value);
  return m;
}

SimpleMartingale SimpleMartingale::two_point(const Point& x, const Point& a, double alpha, const Point& b) {
  SimpleMartingale m;
  m.root.value = x;
  m.root.children.push_back({alpha, a, {}});
  m.root.children.push_back({1.0 - alpha, b, {}});
  return m;
}

namespace {
int node_depth(const MartingaleNode& n) {
  int d = 0;
  for (const auto& c : n.children) d = std::max(d, 1 + node_depth(c));
  return d;
}
size_t node_leaves(const MartingaleNode& n) {
  if (n.leaf()) return 1;
  size_t s = 0;
  for (const auto& c : n.children) s += node_leaves(c);
  return s;
}
}  // namespace

int SimpleMartingale::depth() const { return node_depth(root); }
size_t SimpleMartingale::leaf_count() const { return node_leaves(root); }

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms, double merge_tol) {
  for (auto& a : atoms) {
    if (!(a.mass > 0.0)) continue;
    bool merged = false;
    for (auto& b : atoms_) {
      if ((a.point - b.point).norm() <= merge_tol) {
        b.mass += a.mass;
        merged = true;
        break;
      }
    }
    if (!merged) atoms_.push_back(std::move(a));
  }
}

AtomicMeasure AtomicMeasure::delta(Point p) { return AtomicMeasure({{std::move(p), 1.0}}); }

double AtomicMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.mass;
  return s;
}

Point AtomicMeasure::barycenter() const {
  if (atoms_.empty()) throw std::runtime_error("barycenter of an empty measure");
  Point s = Point::Zero(atoms_[0].point.size());
  for (const auto& a : atoms_) s += a.mass * a.point;
  return s / total_mass();
}

AtomicMeasure AtomicMeasure::combine(const AtomicMeasure& other, double w_self, double w_other) const {
  std::vector<Atom> all;
  for (const auto& a : atoms_) all.push_back({a.point, w_self * a.mass});
  for (const auto& a : other.atoms_) all.push_back({a.point, w_other * a.mass});
  return AtomicMeasure(std::move(all));
}

double AtomicMeasure::max_mass_difference(const AtomicMeasure& other, double point_tol) const {
  double worst = 0.0;
  auto mass_near = [&](const AtomicMeasure& m, const Point& p) {
    double s = 0.0;
    for (const auto& a : m.atoms_) {
      if ((a.point - p).norm() <= point_tol) s += a.mass;
    }
    return s;
  };
  for (const auto& a : atoms_) worst = std::max(worst, std::abs(mass_near(*this, a.point) - mass_near(other, a.point)));
  for (const auto& a : other.atoms_) worst = std::max(worst, std::abs(mass_near(*this, a.point) - mass_near(other, a.point)));
  return worst;
}

bool AtomicMeasure::equals(const AtomicMeasure& other, double mass_tol, double point_tol) const {
  return max_mass_difference(other, point_tol) <= mass_tol;
}

AtomicMeasure distribution(const StepFunction& phi) {
  std::vector<Atom> atoms;
  for (size_t k = 0; k < phi.pieces(); ++k) atoms.push_back({phi.values()[k], phi.length(k)});
  return AtomicMeasure(std::move(atoms));
}

MartingaleReport validate(const SimpleMartingale& m, const LensDomain& lens, const ValidateOptions& opts) {
  MartingaleReport rep;
  rep.min_clearance = std::numeric_limits<double>::infinity();
  auto issue = [&](const std::string& path, const std::string& msg) {
    rep.valid = false;
    rep.issues.push_back({path, msg});
  };
  if (std::abs(m.root.mass - 1.0) > opts.mass_tol) issue("root", "root mass is not 1");
  std::function<void(const MartingaleNode&, const std::string&)> walk = [&](const MartingaleNode& n,
                                                                            const std::string& path) {
    if (n.value.size() != lens.dimension()) {
      issue(path, "value has the wrong dimension");
      return;
    }
    if (!lens.contains(n.value)) issue(path, "value is outside the lens");
    if (n.leaf()) {
      if (!lens.on_fixed_boundary(n.value)) issue(path, "leaf is not on the fixed boundary");
      return;
    }
    double total = 0.0;
    Point bary = Point::Zero(n.value.size());
    std::vector<Point> pts;
    for (const auto& c : n.children) {
      if (!(c.mass > 0.0)) issue(path, "child mass is not positive");
      total += c.mass;
      if (c.value.size() == n.value.size()) {
        bary += c.mass * c.value;
        pts.push_back(c.value);
      }
    }
    if (std::abs(total - 1.0) > opts.mass_tol) issue(path, "children masses do not sum to 1");
    if ((bary - n.value).norm() > opts.identity_tol * (1.0 + n.value.norm())) {
      issue(path, "martingale identity fails");
    }
    if (pts.size() == n.children.size()) {
      double clr = lens.hull_hole_clearance(pts);
      rep.min_clearance = std::min(rep.min_clearance, clr);
      if (!lens.hull_clear(pts)) issue(path, "hull of the children meets a hole or leaves the outer body");
    }
    for (size_t i = 0; i < n.children.size(); ++i) walk(n.children[i], path + "/" + std::to_string(i));
  };
  walk(m.root, "root");
  return rep;
}

double expected_payoff(const SimpleMartingale& m, const BoundaryFunction& f) {
  std::function<double(const MartingaleNode&)> rec = [&](const MartingaleNode& n) {
    if (n.leaf()) return f(n.value);
    double s = 0.0;
    for (const auto& c : n.children) s += c.mass * rec(c);
    return s;
  };
  return rec(m.root);
}

AtomicMeasure terminal_distribution(const SimpleMartingale& m) {
  std::vector<Atom> atoms;
  std::function<void(const MartingaleNode&, double)> rec = [&](const MartingaleNode& n, double w) {
    if (n.leaf()) {
      atoms.push_back({n.value, w});
      return;
    }
    for (const auto& c : n.children) rec(c, w * c.mass);
  };
  rec(m.root, 1.0);
  return AtomicMeasure(std::move(atoms));
}

std::optional<SimpleMartingale> two_point_martingale(const LensDomain& lens, const Point& x) {
  if (!lens.contains(x)) throw GeometryError("point is outside the lens");
  if (lens.on_fixed_boundary(x)) return SimpleMartingale::constant(x);
  auto chord = find_clear_chord(lens, x);
  if (!chord) return std::nullopt;
  double alpha = (x - chord->b).norm() / chord->length();
  return SimpleMartingale::two_point(x, chord->a, alpha, chord->b);
}

SimpleMartingale subtree(const SimpleMartingale& m, const std::vector<size_t>& path) {
  const MartingaleNode* n = &m.root;
  for (size_t i : path) {
    if (i >= n->children.size()) throw std::out_of_range("martingale path leaves the tree");
    n = &n->children[i];
  }
  SimpleMartingale out;
  out.root = *n;
  out.root.mass = 1.0;
  return out;
}

}  // namespace lensbell
