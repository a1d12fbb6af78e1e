#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lensbell/io.hpp"

namespace lensbell {

struct CannedDomain {
  std::string name;
  std::string description;
  // Empty for domains stored only as a definition.
  std::optional<LensDomain> lens;
  // Grid window for unbounded outer bodies.
  std::optional<Box> box;
  BoundaryFunction f;
  bool read_only = false;
  std::string note;
};

std::vector<CannedDomain> canned_domains();
// Throws io::IoError for unknown names.
CannedDomain canned_domain(const std::string& name);

// The three-piece function whose Bellman point sits at (0, -1/3) in the
// channel domain.
StepFunction channel_function();

struct ExtensionSettings {
  double eps = 0.05;
  double outer_margin = 0.2;
  std::vector<double> shrinks = ExtensionConfig{}.shrinks;
  double concavity_tol = ExtensionConfig{}.concavity_tol;
  double reach = ExtensionConfig{}.reach;
};

struct ScenarioConfig {
  // check | solve | split | glue | extend | counterexample
  std::string pipeline = "solve";
  // Canned domain name; empty when lens is given explicitly.
  std::string domain;
  std::optional<LensDomain> lens;
  BoundaryFunction f = BoundaryFunction::zero();
  SolverConfig solver;
  SplitConfig split;
  ExtensionSettings extension;
  GlueBudget glue;
  std::optional<StepFunction> function;
  std::optional<SimpleMartingale> martingale;
  std::optional<Point> point;
  // Random cases generated for split and glue when no input is given.
  int samples = 0;
  double concavity_tol = 1e-6;
  std::string out = "out";
  std::uint64_t seed = 1;
};

ScenarioConfig parse_config(const std::string& doc);
std::string emit_config(const ScenarioConfig& cfg);

// Canned config for `example <name>`.
ScenarioConfig example_config(const std::string& name);

LensDomain resolve_lens(const ScenarioConfig& cfg);

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ScenarioOutcome {
  int status = 0;
  std::vector<CheckResult> checks;
  std::vector<std::string> files;
};

// Runs the pipeline and writes its artifacts under cfg.out. status is
// nonzero iff a check failed.
ScenarioOutcome run_scenario(const ScenarioConfig& cfg);

std::string heatmap_svg(const ScalarField& field, const LensDomain& lens);
void emit_heatmap(const ScalarField& field, const LensDomain& lens, const std::string& path);

}  // namespace lensbell
