#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lensbell/classes.hpp"

namespace lensbell {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Axis-aligned node grid; node (i, j) sits at (x0 + i h, y0 + j h).
struct GridSpec {
  double x0 = 0.0, y0 = 0.0, h = 0.01;
  int nx = 0, ny = 0;

  Point node(int i, int j) const { return make_point(x0 + i * h, y0 + j * h); }
  size_t index(int i, int j) const { return static_cast<size_t>(j) * nx + i; }
  size_t size() const { return static_cast<size_t>(nx) * ny; }
};

struct Box {
  double xmin, ymin, xmax, ymax;
};

struct SolverMeta {
  int iterations = 0;
  double last_update = 0.0;
  std::vector<double> updates;
  long boundary_samples = 0;
  long seeded_nodes = 0;
  int directions = 0;
  bool converged = false;
};

// Node values over a lens. NaN marks nodes no simple martingale reached.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GridSpec grid, std::vector<std::uint8_t> mask);

  const GridSpec& grid() const { return grid_; }
  bool masked(int i, int j) const { return mask_[grid_.index(i, j)] != 0; }
  bool reached(int i, int j) const;
  double at(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& at(int i, int j) { return values_[grid_.index(i, j)]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

  // Nodes within 3h of a truncation cut are left out of every metric.
  bool reportable(int i, int j) const { return masked(i, j) && !band_[grid_.index(i, j)]; }
  void set_band(std::vector<std::uint8_t> band) { band_ = std::move(band); }
  const std::vector<std::uint8_t>& band() const { return band_; }

  // Bilinear interpolation; empty unless all four corners are reached.
  std::optional<double> interpolate(const Point& p) const;
  double sup_norm() const;
  size_t masked_count() const;
  size_t reached_count() const;

  SolverMeta meta;

 private:
  GridSpec grid_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::uint8_t> band_;
  std::vector<double> values_;
};

struct SolverConfig {
  double h = 0.01;
  int directions = 48;
  double tol = 1e-10;
  int max_iterations = 400;
  // Tangent chords seeded per node next to the holes.
  bool seed_tangent_chords = true;
  // Required for unbounded outer bodies.
  std::optional<Box> box;

  void validate() const;
};

// Primitive lattice directions sorted by length then angle.
std::vector<std::pair<int, int>> lattice_directions(int count);

ScalarField solve_bs(const LensDomain& lens, const BoundaryFunction& f, const SolverConfig& cfg);

struct ConcavityViolation {
  Point a, b;
  double t;
  double defect;
};

struct ConcavityReport {
  bool passed = true;
  int segments = 0;
  int skipped = 0;
  double worst_defect = 0.0;
  std::vector<ConcavityViolation> violations;
};

struct ConcavityOptions {
  int random_segments = 4000;
  double tol = 1e-9;
  std::uint64_t seed = 11;
  // Short segments centred on every reached node along four directions.
  bool node_segments = true;
  size_t max_violations = 20;
};

using Evaluator = std::function<std::optional<double>(const Point&)>;

ConcavityReport check_local_concavity(const ScalarField& field, const LensDomain& lens,
                                      const ConcavityOptions& opts = {});
// Same check on an arbitrary evaluator sampled over the box.
ConcavityReport check_local_concavity(const Evaluator& value, const LensDomain& lens, const Box& box,
                                      double h, double scale, const ConcavityOptions& opts = {});

struct DomainComparison {
  double sup_difference = 0.0;
  Point where;
  size_t common_nodes = 0;
  ScalarField open_field, closed_field;
};

DomainComparison compare_domains(const LensDomain& lens, const BoundaryFunction& f, const SolverConfig& cfg);

struct Continuation {
  double value = 0.0;
  // distances from x of the two nodes used
  double s1 = 0.0, s2 = 0.0;
  // Values on the free boundary are outside the identity's guarantee.
  std::string note = "free boundary: outside the guaranteed range";
};

// One-sided limit along the transversal segment at x, or along dir when
// given (dir must point away from the hole).
Continuation free_boundary_continuation(const ScalarField& field, const LensDomain& lens, const Point& x,
                                        const std::optional<Point>& dir = std::nullopt);

Box bounding_box(const LensDomain& lens, const SolverConfig& cfg);

}  // namespace lensbell
