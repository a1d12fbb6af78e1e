#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lensbell/solver.hpp"

namespace lensbell {

class ExtensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Provenance { superdifferential, perturbed, tangent };

const char* to_string(Provenance p);

// y -> value + coeffs . (y - anchor)
struct LinearFunctional {
  Point coeffs;
  double value = 0.0;
  Point anchor;
  Provenance provenance = Provenance::superdifferential;

  double operator()(const Point& y) const { return value + coeffs.dot(y - anchor); }
  // the linear part alone, applied to a displacement
  double slope(const Point& v) const { return coeffs.dot(v); }
};

struct SuperdiffOptions {
  int boundary_samples = 4096;
  // Fixed-boundary points this close to the tangent plane are skipped.
  double min_depth = 1e-9;
};

struct SuperdiffReport {
  LinearFunctional functional;
  double ell = 0.0;
  double a = 0.0;
  // fixed-boundary point attaining the supremum for a
  Point contact;
  int visible_samples = 0;
  // continuation value before it was raised to the tangent hull
  double continuation = 0.0;
};

SuperdiffReport superdifferential_at(const ScalarField& field, const LensDomain& lens, const BoundaryFunction& f,
                                     const Point& x, const SuperdiffOptions& opts = {});

// Supporting inequality checked at points visible from x; returns the
// largest excess value(y) - L(y).
struct SupportCheck {
  int points = 0;
  double worst_excess = 0.0;
  Point worst;
};

SupportCheck check_supporting(const ScalarField& field, const LensDomain& lens, const LinearFunctional& L,
                              int n_points, std::uint64_t seed = 5);

// G = field + eps g with g = 1 - |x - c|^2 / R^2, which lies in [0, 1] on the
// lens and is strongly concave.
struct Perturbation {
  ScalarField field;
  Point center;
  double radius = 1.0;
  double eps = 0.0;

  double g(const Point& x) const;
  Point grad_g(const Point& x) const;
  LinearFunctional lift(const LinearFunctional& L) const;
};

Perturbation strong_concavity_perturb(const ScalarField& field, const LensDomain& lens, double eps);

// Least c with G(y) <= G(x) + L[G,x](y - x) - c |x - y|^2 over pairs of
// free-boundary samples closer than max_distance.
struct DecayFit {
  double c = 0.0;
  int pairs = 0;
};

DecayFit fit_decay_constant(const Perturbation& pert, const LensDomain& lens, const BoundaryFunction& f,
                            int n_points, double max_distance, const SuperdiffOptions& opts = {});

struct ExtensionConfig {
  // Hole homothety factors, tried from the smallest hole upward.
  std::vector<double> shrinks = {0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95};
  int free_samples = 256;
  // Free-boundary samples farther than reach * hole scale from a query are
  // not used for it.
  double reach = 0.5;
  double concavity_tol = 1e-3;
  ConcavityOptions concavity;
  SuperdiffOptions superdiff;
  int fixed_samples = 256;
};

struct Witness {
  Point query;
  Point minimizer;
  LinearFunctional functional;
};

struct ExtensionResult {
  bool ok = false;
  LensDomain lens;
  // Grid values over the extended lens; identical to the input on its mask.
  ScalarField field;
  Evaluator value;
  double level = 0.0;
  std::vector<double> tried;
  ConcavityReport concavity;
  std::vector<Witness> witnesses;
  std::string note;
};

// Extension through the free boundary of the perturbed field.
ExtensionResult extend_through_free(const ScalarField& field, const LensDomain& lens, const BoundaryFunction& f,
                                    double eps, const ExtensionConfig& cfg = {});

// Extension through the fixed boundary into an inflated outer body.
ExtensionResult extend_through_fixed(const ScalarField& field, const LensDomain& lens, double outer_margin,
                                     const ExtensionConfig& cfg = {});

struct RegressionReport {
  bool degenerate = false;
  double free_exponent = 0.0;
  double contact_exponent = 0.0;
  int free_pairs = 0;
  int contact_points = 0;
  double max_gap = 0.0;
  std::string note;
};

RegressionReport boundary_regression(const ScalarField& field, const LensDomain& lens, const BoundaryFunction& f,
                                     int n_points = 96, const SuperdiffOptions& opts = {});

}  // namespace lensbell
