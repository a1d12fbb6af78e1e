#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lensbell/martingale.hpp"

namespace lensbell {

struct MeasureNode {
  double mass = 1.0;
  Point value;
  // Conditional law of the terminal value given this node.
  AtomicMeasure measure;
  std::vector<MeasureNode> children;

  bool leaf() const { return children.empty(); }
};

struct MeasureMartingale {
  MeasureNode root;
};

MeasureMartingale lift_to_measures(const SimpleMartingale& m);

struct HatHole {
  // One enlarged body per hole of the lens.
  std::vector<ConvexBody> bodies;
  double eps = 1.0;
  // Clearance of the martingale hulls from the chosen bodies.
  double margin = 0.0;
  // Blend parameter where the clearance vanishes.
  double critical_eps = 0.0;
};

class GluingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

HatHole choose_hat_hole(const SimpleMartingale& m, const LensDomain& lens);

struct LiftReport {
  bool valid = true;
  std::vector<Issue> issues;
};

LiftReport validate_lift(const MeasureMartingale& mm, const std::vector<ConvexBody>& hat_holes,
                         double tol = 1e-12);
LiftReport validate_lift(const MeasureMartingale& mm, const ConvexBody& hat_hole, double tol = 1e-12);

struct GlueBudget {
  // Atom counts up to this are searched exhaustively.
  int exhaustive_atoms = 8;
  long max_orderings = 50000;
  int anneal_steps = 4000;
  // Arcs beyond one per atom allowed when atoms are split.
  int extra_arcs = 4;
  std::uint64_t seed = 1;
};

struct RealizationReport {
  bool found = false;
  std::optional<StepFunction> function;
  HatHole hat;
  long orderings_tried = 0;
  double best_margin = -1.0;
  MembershipReport verifier;
  std::string note;
};

RealizationReport realize_on_circle(const SimpleMartingale& m, const LensDomain& lens,
                                    const GlueBudget& budget = {});

}  // namespace lensbell
