#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lensbell/classes.hpp"
#include "lensbell/geometry.hpp"

namespace lensbell {

// Node of a finite martingale tree. mass is conditional on the parent.
struct MartingaleNode {
  double mass = 1.0;
  Point value;
  std::vector<MartingaleNode> children;

  bool leaf() const { return children.empty(); }
};

struct SimpleMartingale {
  MartingaleNode root;

  static SimpleMartingale constant(Point value);
  static SimpleMartingale two_point(const Point& x, const Point& a, double alpha, const Point& b);

  const Point& start() const { return root.value; }
  int depth() const;
  size_t leaf_count() const;
};

struct Atom {
  Point point;
  double mass;
};

class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(std::vector<Atom> atoms, double merge_tol = 1e-10);

  static AtomicMeasure delta(Point p);

  const std::vector<Atom>& atoms() const { return atoms_; }
  size_t size() const { return atoms_.size(); }
  double total_mass() const;
  Point barycenter() const;
  // Mass-weighted combination; atoms are merged.
  AtomicMeasure combine(const AtomicMeasure& other, double w_self, double w_other) const;
  // Same atoms (within point_tol) with masses within mass_tol.
  bool equals(const AtomicMeasure& other, double mass_tol, double point_tol = 1e-10) const;
  double max_mass_difference(const AtomicMeasure& other, double point_tol = 1e-10) const;

 private:
  std::vector<Atom> atoms_;
};

AtomicMeasure distribution(const StepFunction& phi);

struct Issue {
  std::string path;
  std::string message;
};

struct MartingaleReport {
  bool valid = true;
  std::vector<Issue> issues;
  // Smallest hole clearance of a node hull.
  double min_clearance = 0.0;
};

struct ValidateOptions {
  double mass_tol = 1e-12;
  double identity_tol = 1e-10;
};

MartingaleReport validate(const SimpleMartingale& m, const LensDomain& lens,
                          const ValidateOptions& opts = {});

double expected_payoff(const SimpleMartingale& m, const BoundaryFunction& f);

AtomicMeasure terminal_distribution(const SimpleMartingale& m);

std::optional<SimpleMartingale> two_point_martingale(const LensDomain& lens, const Point& x);

// Subtree at the given child path, renormalized to a root of mass 1.
SimpleMartingale subtree(const SimpleMartingale& m, const std::vector<size_t>& path);

}  // namespace lensbell
