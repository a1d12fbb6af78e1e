#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "lensbell/scenarios.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<double> grid;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Overrides& o, bool need_config) {
  auto* c = sub->add_option("--config", o.config, "scenario config (JSON)");
  if (need_config) c->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--grid", o.grid, "grid step h")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "random seed");
}

int run(lensbell::ScenarioConfig cfg, const Overrides& o) {
  if (!o.out.empty()) cfg.out = o.out;
  if (o.grid) cfg.solver.h = *o.grid;
  if (o.seed) cfg.seed = cfg.glue.seed = *o.seed;
  cfg.solver.validate();
  auto res = lensbell::run_scenario(cfg);
  for (const auto& c : res.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << ": " << c.detail;
    std::cout << '\n';
  }
  std::cout << "wrote " << res.files.size() << " files to " << cfg.out << '\n';
  return res.status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally concave envelopes on lens domains"};
  app.require_subcommand(1);
  Overrides o;
  std::string example;
  const char* pipelines[] = {"check", "solve", "split", "glue", "extend"};
  for (const char* p : pipelines) add_common(app.add_subcommand(p, std::string("run the ") + p + " pipeline"), o, true);
  auto* ex = app.add_subcommand("example", "run the canned scenario for a domain");
  ex->add_option("name", example, "domain name")->required();
  add_common(ex, o, false);
  auto* list = app.add_subcommand("domains", "list the canned domains");

  CLI11_PARSE(app, argc, argv);
  try {
    if (list->parsed()) {
      for (const auto& d : lensbell::canned_domains()) {
        std::cout << d.name << (d.read_only ? " (definition only)" : "") << ": " << d.description << '\n';
      }
      return 0;
    }
    if (ex->parsed()) {
      auto cfg = o.config.empty() ? lensbell::example_config(example)
                                  : lensbell::parse_config(lensbell::io::read_file(o.config));
      return run(cfg, o);
    }
    for (auto* sub : app.get_subcommands()) {
      auto cfg = lensbell::parse_config(lensbell::io::read_file(o.config));
      cfg.pipeline = sub->get_name();
      return run(cfg, o);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
