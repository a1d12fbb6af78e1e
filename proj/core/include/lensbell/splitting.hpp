#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "lensbell/classes.hpp"
#include "lensbell/martingale.hpp"

namespace lensbell {

struct SplitConfig {
  // Holes are shrunk by this homothety factor about their interior point.
  double shrink = 0.9;
  int resolution = 64;
  int max_depth = 48;
  double slack = 1.05;
  int delta_samples = 512;

  void validate(size_t pieces) const;
};

struct SplitChoice {
  double t = 0.0;
  double ratio = 1.0;
  // Hole clearance of the segment between the two child averages.
  double margin = 0.0;
};

class SplitError : public std::runtime_error {
 public:
  SplitError(const std::string& msg, double s, double e, std::optional<SplitChoice> best)
      : std::runtime_error(msg), s(s), e(e), best(best) {}
  double s, e;
  std::optional<SplitChoice> best;
};

std::vector<ConvexBody> shrink_holes(const LensDomain& lens, double shrink);

SplitChoice split_interval(const StepFunction& phi, double s, double e,
                           const std::vector<ConvexBody>& shrunk_holes, double bound,
                           const SplitConfig& cfg);

struct TraceEntry {
  std::vector<size_t> path;
  double s = 0.0, e = 1.0;
  Point average;
  double t = 0.0;
  double ratio = 1.0;
  double bound = 1.0;
  int depth = 0;
};

struct SplitResult {
  SimpleMartingale martingale;
  std::vector<TraceEntry> trace;
  LensDomain extended;
  double expected = 0.0;
  double payoff = 0.0;
};

SplitResult build_martingale(const StepFunction& phi, const LensDomain& lens, const SplitConfig& cfg,
                             const BoundaryFunction& f);

}  // namespace lensbell
