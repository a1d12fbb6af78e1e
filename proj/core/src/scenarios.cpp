#include "lensbell/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "json_detail.hpp"

namespace lensbell {

using io::IoError;
using io::detail::json;
namespace fs = std::filesystem;

std::vector<CannedDomain> canned_domains() {
  const Point o = make_point(0, 0);
  const auto disk = ConvexBody::ball(o, 1.0);
  std::vector<CannedDomain> out;
  out.push_back({"disk_in_disk", "unit disk minus the concentric disk of radius 0.4",
                 LensDomain(disk, ConvexBody::ball(o, 0.4)), std::nullopt, BoundaryFunction::cos_angle(1), false, ""});
  out.push_back({"channel", "unit disk minus two disks of radius 1/2.9 centred at (+-1/2, 0)",
                 LensDomain(disk, {ConvexBody::ball(make_point(-0.5, 0), 1.0 / 2.9),
                                   ConvexBody::ball(make_point(0.5, 0), 1.0 / 2.9)}),
                 std::nullopt, BoundaryFunction::channel(), false, ""});
  {
    const double r = std::sqrt(3.0) / 4.0 - 1.0 / 239.0;
    std::vector<ConvexBody> holes;
    for (int j = 0; j < 3; ++j) {
      double a = 2.0 * std::numbers::pi * j / 3.0;
      holes.push_back(ConvexBody::ball(make_point(0.5 * std::cos(a), 0.5 * std::sin(a)), r));
    }
    out.push_back({"cheese", "unit disk minus three nearly touching disks centred at (1/2) e^(2 pi i j / 3)",
                   LensDomain(disk, std::move(holes)), std::nullopt, BoundaryFunction::zero(), false, ""});
  }
  out.push_back({"bmo", "parabolic strip x^2 <= y <= x^2 + 1",
                 LensDomain(ConvexBody::paraboloid(2, 0.0), ConvexBody::paraboloid(2, 1.0)),
                 Box{-2.0, 0.0, 2.0, 4.0}, BoundaryFunction::exp_coordinate(0), false, ""});
  out.push_back({"sphere_bmo", "unit disk minus the disk |x|^2 < 1 - eps^2, eps = 1/2",
                 LensDomain(disk, ConvexBody::ball(o, std::sqrt(0.75))), std::nullopt,
                 BoundaryFunction::exp_coordinate(0), false, ""});
  out.push_back({"a2", "weight domain 1 <= x y <= 2 in the positive quadrant",
                 LensDomain(ConvexBody::hyperbola(0.0, 1.0), ConvexBody::hyperbola(0.0, 2.0)),
                 Box{0.2, 0.2, 5.0, 5.0}, BoundaryFunction::power_coordinate(0, 1.0), false, ""});
  out.push_back({"hyperbola_pair", "x y > 1 minus (x - 1)(y - 1) > 1",
                 LensDomain(ConvexBody::hyperbola(0.0, 1.0), ConvexBody::hyperbola(1.0, 1.0)),
                 Box{0.2, 0.2, 6.0, 6.0}, BoundaryFunction::zero(), false, ""});
  out.push_back({"cone_fail", "sqrt(x^2 + 1) <= y <= x^2 + 2; recession cones differ",
                 LensDomain(ConvexBody::hyperboloid(2, 1.0), ConvexBody::paraboloid(2, 2.0)),
                 Box{-3.0, 1.0, 3.0, 6.0}, BoundaryFunction::zero(), false, ""});
  out.push_back({"multiplicative",
                 "interior of conv{(t, t^2, |t|^p)} minus {y > x^2 + eps^2, z > 0} in three dimensions",
                 std::nullopt, std::nullopt, BoundaryFunction::zero(), true,
                 "the hole closure is not inside the outer body; stored as a definition only"});
  return out;
}

CannedDomain canned_domain(const std::string& name) {
  for (auto& d : canned_domains()) {
    if (d.name == name) return d;
  }
  throw IoError("unknown domain '" + name + "'");
}

StepFunction channel_function() {
  return StepFunction(Carrier::interval, {0.0, 1.0 / 3.0, 2.0 / 3.0},
                      {make_point(-1, 0), make_point(0, -1), make_point(1, 0)});
}

// ---------------------------------------------------------------- config

namespace {

const std::set<std::string> kPipelines = {"check", "solve", "split", "glue", "extend", "counterexample"};

void reject_unknown(const json& j, const std::set<std::string>& keys, const std::string& where) {
  if (!j.is_object()) throw IoError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw IoError("unknown key '" + k + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw IoError(std::string("bad value for '") + key + "'");
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& doc) {
  json j = io::detail::parse(doc);
  reject_unknown(j,
                 {"pipeline", "domain", "lens", "function", "solver", "split", "extension", "glue", "step_function",
                  "martingale", "point", "samples", "concavity_tol", "out", "seed"},
                 "config");
  ScenarioConfig c;
  try {
    read(j, "pipeline", c.pipeline);
    if (!kPipelines.count(c.pipeline)) throw IoError("unknown pipeline '" + c.pipeline + "'");
    read(j, "domain", c.domain);
    if (j.contains("lens")) c.lens = io::detail::lens(j.at("lens"));
    if (c.domain.empty() == !c.lens.has_value()) throw IoError("give exactly one of 'domain' and 'lens'");
    if (!c.domain.empty()) {
      auto d = canned_domain(c.domain);
      if (d.read_only) throw IoError("domain '" + c.domain + "' is stored as a definition only");
      c.f = d.f;
      if (d.box) c.solver.box = d.box;
    }
    if (j.contains("function")) c.f = io::detail::function(j.at("function"));
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      reject_unknown(s, {"h", "directions", "tol", "max_iterations", "seed_tangent_chords", "box"}, "solver");
      read(s, "h", c.solver.h);
      read(s, "directions", c.solver.directions);
      read(s, "tol", c.solver.tol);
      read(s, "max_iterations", c.solver.max_iterations);
      read(s, "seed_tangent_chords", c.solver.seed_tangent_chords);
      if (s.contains("box")) {
        if (s.at("box").is_null()) {
          c.solver.box.reset();
        } else {
          auto b = s.at("box").get<std::vector<double>>();
          if (b.size() != 4) throw IoError("box needs [xmin, ymin, xmax, ymax]");
          c.solver.box = Box{b[0], b[1], b[2], b[3]};
        }
      }
    }
    if (j.contains("split")) {
      const json& s = j.at("split");
      reject_unknown(s, {"shrink", "resolution", "max_depth", "slack", "delta_samples"}, "split");
      read(s, "shrink", c.split.shrink);
      read(s, "resolution", c.split.resolution);
      read(s, "max_depth", c.split.max_depth);
      read(s, "slack", c.split.slack);
      read(s, "delta_samples", c.split.delta_samples);
    }
    if (j.contains("extension")) {
      const json& s = j.at("extension");
      reject_unknown(s, {"eps", "outer_margin", "shrinks", "concavity_tol", "reach"}, "extension");
      read(s, "eps", c.extension.eps);
      read(s, "outer_margin", c.extension.outer_margin);
      read(s, "shrinks", c.extension.shrinks);
      read(s, "concavity_tol", c.extension.concavity_tol);
      read(s, "reach", c.extension.reach);
    }
    if (j.contains("glue")) {
      const json& s = j.at("glue");
      reject_unknown(s, {"exhaustive_atoms", "max_orderings", "anneal_steps", "extra_arcs"}, "glue");
      read(s, "exhaustive_atoms", c.glue.exhaustive_atoms);
      read(s, "max_orderings", c.glue.max_orderings);
      read(s, "anneal_steps", c.glue.anneal_steps);
      read(s, "extra_arcs", c.glue.extra_arcs);
    }
    if (j.contains("step_function")) c.function = io::detail::step(j.at("step_function"));
    if (j.contains("martingale")) c.martingale = io::detail::martingale(j.at("martingale"));
    if (j.contains("point")) c.point = io::detail::point(j.at("point"));
    read(j, "samples", c.samples);
    read(j, "concavity_tol", c.concavity_tol);
    read(j, "out", c.out);
    if (c.pipeline == "glue" && !j.contains("seed")) throw IoError("gluing configs must set 'seed'");
    read(j, "seed", c.seed);
    c.glue.seed = c.seed;
    c.solver.validate();
  } catch (const json::exception& e) {
    throw IoError(std::string("bad config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("bad config: ") + e.what());
  } catch (const SolverError& e) {
    throw IoError(std::string("bad config: ") + e.what());
  }
  return c;
}

std::string emit_config(const ScenarioConfig& c) {
  json j;
  j["pipeline"] = c.pipeline;
  if (!c.domain.empty()) j["domain"] = c.domain;
  if (c.lens) j["lens"] = io::detail::lens(*c.lens);
  j["function"] = io::detail::function(c.f);
  json s{{"h", c.solver.h},
         {"directions", c.solver.directions},
         {"tol", c.solver.tol},
         {"max_iterations", c.solver.max_iterations},
         {"seed_tangent_chords", c.solver.seed_tangent_chords}};
  if (c.solver.box) s["box"] = {c.solver.box->xmin, c.solver.box->ymin, c.solver.box->xmax, c.solver.box->ymax};
  else s["box"] = nullptr;
  j["solver"] = s;
  j["split"] = {{"shrink", c.split.shrink},
                {"resolution", c.split.resolution},
                {"max_depth", c.split.max_depth},
                {"slack", c.split.slack},
                {"delta_samples", c.split.delta_samples}};
  j["extension"] = {{"eps", c.extension.eps},
                    {"outer_margin", c.extension.outer_margin},
                    {"shrinks", c.extension.shrinks},
                    {"concavity_tol", c.extension.concavity_tol},
                    {"reach", c.extension.reach}};
  j["glue"] = {{"exhaustive_atoms", c.glue.exhaustive_atoms},
               {"max_orderings", c.glue.max_orderings},
               {"anneal_steps", c.glue.anneal_steps},
               {"extra_arcs", c.glue.extra_arcs}};
  if (c.function) j["step_function"] = io::detail::step(*c.function);
  if (c.martingale) j["martingale"] = io::detail::martingale(*c.martingale);
  if (c.point) j["point"] = io::detail::point(*c.point);
  j["samples"] = c.samples;
  j["concavity_tol"] = c.concavity_tol;
  j["out"] = c.out;
  j["seed"] = c.seed;
  return io::detail::dump(j);
}

ScenarioConfig example_config(const std::string& name) {
  auto d = canned_domain(name);
  if (d.read_only) throw IoError("domain '" + name + "' has no runnable example");
  ScenarioConfig c;
  c.domain = name;
  c.f = d.f;
  c.solver.box = d.box;
  c.out = "out/" + name;
  if (name == "channel" || name == "cheese") {
    c.pipeline = "counterexample";
    if (name == "channel") c.point = make_point(0.0, -1.0 / 3.0);
  } else if (name == "disk_in_disk") {
    c.pipeline = "extend";
  } else if (name == "cone_fail" || name == "hyperbola_pair") {
    c.pipeline = "check";
  } else {
    c.pipeline = "solve";
  }
  return c;
}

LensDomain resolve_lens(const ScenarioConfig& cfg) {
  if (cfg.lens) return *cfg.lens;
  auto d = canned_domain(cfg.domain);
  if (!d.lens) throw IoError("domain '" + cfg.domain + "' is stored as a definition only");
  return *d.lens;
}

// ---------------------------------------------------------------- heatmap

std::string heatmap_svg(const ScalarField& field, const LensDomain& lens) {
  const auto& g = field.grid();
  const double px = 4.0;
  const double W = std::max(g.nx, 1) * px, H = std::max(g.ny, 1) * px;
  double lo = INFINITY, hi = -INFINITY;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (field.reached(i, j)) lo = std::min(lo, field.at(i, j)), hi = std::max(hi, field.at(i, j));
    }
  }
  auto sx = [&](double x) { return (x - g.x0) / g.h * px + 0.5 * px; };
  auto sy = [&](double y) { return H - ((y - g.y0) / g.h * px + 0.5 * px); };
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                W, H, W, H);
  os << buf;
  os << "<defs><pattern id=\"hatch\" width=\"4\" height=\"4\" patternUnits=\"userSpaceOnUse\">"
        "<rect width=\"4\" height=\"4\" fill=\"#ffffff\"/><path d=\"M0,4 L4,0\" stroke=\"#555555\" stroke-width=\"1\"/>"
        "</pattern></defs>\n";
  if (std::isfinite(lo)) {
    std::snprintf(buf, sizeof buf, "<!-- range %.17g %.17g -->\n", lo, hi);
    os << buf;
  }
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!field.masked(i, j)) continue;
      double x = i * px, y = H - (j + 1) * px;
      if (!field.reached(i, j)) {
        std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.0f\" height=\"%.0f\" fill=\"url(#hatch)\"/>\n",
                      x, y, px, px);
      } else {
        double t = hi > lo ? (field.at(i, j) - lo) / (hi - lo) : 0.5;
        int r = static_cast<int>(std::lround(255 * t)), b = 255 - r;
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.0f\" height=\"%.0f\" fill=\"rgb(%d,64,%d)\"/>\n", x, y,
                      px, px, r, b);
      }
      os << buf;
    }
  }
  // boundaries as polylines in the angular order of the samples
  auto draw = [&](const ConvexBody& body, const char* colour) {
    if (body.dimension() != 2) return;
    const int n = 720;
    std::string pts;
    auto flush = [&] {
      if (!pts.empty()) {
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
      }
      pts.clear();
    };
    for (int k = 0; k <= n; ++k) {
      auto p = body.boundary_point(2.0 * std::numbers::pi * k / n);
      bool in = p && (*p)[0] >= g.x0 - g.h && (*p)[0] <= g.x0 + g.nx * g.h && (*p)[1] >= g.y0 - g.h &&
                (*p)[1] <= g.y0 + g.ny * g.h;
      if (!in) {
        flush();
        continue;
      }
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx((*p)[0]), sy((*p)[1]));
      pts += buf;
    }
    flush();
  };
  draw(lens.outer(), "#000000");
  for (const auto& h : lens.holes()) draw(h, "#008800");
  os << "</svg>\n";
  return os.str();
}

void emit_heatmap(const ScalarField& field, const LensDomain& lens, const std::string& path) {
  io::write_file(path, heatmap_svg(field, lens));
}

// ---------------------------------------------------------------- pipelines

namespace {

struct Run {
  const ScenarioConfig& cfg;
  LensDomain lens;
  ScenarioOutcome out;
  json summary;

  void check(const std::string& name, bool ok, const std::string& detail) {
    out.checks.push_back({name, ok, detail});
  }
  void write(const std::string& file, const std::string& content) {
    fs::path p = fs::path(cfg.out) / file;
    io::write_file(p.string(), content);
    out.files.push_back(p.string());
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void emit_field(Run& r, const ScalarField& F, const std::string& stem) {
  r.write(stem + ".csv", io::field_csv(F));
  r.write(stem + ".json", io::field_meta_json(F));
  r.write(stem + ".svg", heatmap_svg(F, r.lens));
}

std::optional<StepFunction> random_step(const LensDomain& lens, std::mt19937_64& rng, int max_pieces) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int attempt = 0; attempt < 400; ++attempt) {
    int n = 2 + static_cast<int>(rng() % static_cast<unsigned>(std::max(1, max_pieces - 1)));
    double c = 2.0 * std::numbers::pi * U(rng), w = 0.3 + 1.5 * U(rng);
    std::vector<double> br{0.0};
    for (int i = 1; i < n; ++i) br.push_back(U(rng));
    std::sort(br.begin(), br.end());
    if (std::adjacent_find(br.begin(), br.end()) != br.end()) continue;
    std::vector<Point> v;
    for (int i = 0; i < n; ++i) {
      auto p = lens.outer().boundary_point(c + w * (U(rng) - 0.5));
      if (!p) break;
      v.push_back(*p);
    }
    if (static_cast<int>(v.size()) != n) continue;
    StepFunction phi(Carrier::interval, br, v);
    if (interval_membership(phi, lens).verdict == MembershipVerdict::member) return phi;
  }
  return std::nullopt;
}

void run_check(Run& r) {
  auto conds = check_conditions(r.lens, 256);
  r.write("conditions.json", io::to_json(conds));
  for (const auto& c : conds) {
    r.check(c.condition, c.verdict != Verdict::fail, std::string(to_string(c.verdict)) + (c.note.empty() ? "" : ": " + c.note));
  }
  if (r.cfg.function) {
    auto m = r.cfg.function->carrier() == Carrier::interval
                 ? interval_membership(*r.cfg.function, r.lens)
                 : circle_membership(*r.cfg.function, r.lens, r.lens.holes());
    r.write("membership.json", io::to_json(m));
    r.check("membership", m.verdict != MembershipVerdict::violated,
            std::string(to_string(m.verdict)) + ", margin " + num(m.margin));
  }
}

ScalarField run_solve(Run& r, bool certify) {
  ScalarField F = solve_bs(r.lens, r.cfg.f, r.cfg.solver);
  emit_field(r, F, "field");
  r.check("solver converged", F.meta.converged, std::to_string(F.meta.iterations) + " passes");
  if (certify) {
    // lattice-direction segments are an invariant of the scheme; random
    // directions only measure the discretization and are reported
    ConcavityOptions co;
    co.tol = r.cfg.concavity_tol;
    co.seed = r.cfg.seed;
    co.random_segments = 0;
    auto rep = check_local_concavity(F, r.lens, co);
    co.node_segments = false;
    co.random_segments = ConcavityOptions{}.random_segments;
    auto diag = check_local_concavity(F, r.lens, co);
    json j{{"lattice", io::detail::parse(io::to_json(rep))}, {"random_directions", io::detail::parse(io::to_json(diag))}};
    r.write("concavity.json", io::detail::dump(j));
    r.check("local concavity", rep.passed, "worst defect " + num(rep.worst_defect) + ", off-lattice " + num(diag.worst_defect));
  }
  r.summary["unreached"] = F.masked_count() - F.reached_count();
  return F;
}

void split_one(Run& r, const StepFunction& phi, int idx, json& cases) {
  json c{{"index", idx}};
  try {
    auto res = build_martingale(phi, r.lens, r.cfg.split, r.cfg.f);
    auto v = validate(res.martingale, res.extended);
    bool dist = terminal_distribution(res.martingale).equals(distribution(phi.merged(0.0)), 1e-12);
    bool pay = std::abs(res.expected - res.payoff) <= 1e-9;
    bool ratios = true;
    for (const auto& t : res.trace) ratios = ratios && t.ratio <= t.bound * r.cfg.split.slack;
    c["valid"] = v.valid;
    c["distribution"] = dist;
    c["payoff_identity"] = pay;
    c["ratios"] = ratios;
    c["leaves"] = res.martingale.leaf_count();
    c["expected"] = res.expected;
    c["payoff"] = res.payoff;
    std::string tag = " #" + std::to_string(idx);
    r.check("martingale valid" + tag, v.valid, v.issues.empty() ? "" : v.issues.front().message);
    r.check("distribution" + tag, dist, "");
    r.check("payoff identity" + tag, pay, num(res.expected) + " vs " + num(res.payoff));
    r.check("split ratios" + tag, ratios, "");
    if (idx == 0) {
      r.write("martingale.json", io::to_json(res.martingale));
      r.write("trace.json", io::to_json(res.trace));
    }
  } catch (const SplitError& e) {
    c["error"] = e.what();
    r.check("split #" + std::to_string(idx), false, e.what());
  }
  cases.push_back(c);
}

void run_split(Run& r) {
  json cases = json::array();
  if (r.cfg.function) {
    split_one(r, *r.cfg.function, 0, cases);
  } else {
    std::mt19937_64 rng(r.cfg.seed);
    for (int k = 0; k < std::max(1, r.cfg.samples); ++k) {
      auto phi = random_step(r.lens, rng, 6);
      if (!phi) {
        r.check("random function #" + std::to_string(k), false, "no admissible function found");
        continue;
      }
      split_one(r, *phi, k, cases);
    }
  }
  r.write("split_report.json", io::detail::dump(cases));
}

void glue_one(Run& r, const SimpleMartingale& m, int idx, json& cases) {
  std::string tag = " #" + std::to_string(idx);
  GlueBudget b = r.cfg.glue;
  b.seed = r.cfg.seed + idx;
  try {
    auto rep = realize_on_circle(m, r.lens, b);
    json c = io::detail::parse(io::to_json(rep));
    c["index"] = idx;
    r.check("realized" + tag, rep.found, rep.note);
    if (rep.found && rep.function) {
      bool dist = distribution(*rep.function).equals(terminal_distribution(m), 1e-12);
      double pay = payoff(*rep.function, r.cfg.f), ex = expected_payoff(m, r.cfg.f);
      r.check("distribution" + tag, dist, "");
      r.check("payoff identity" + tag, std::abs(pay - ex) <= 1e-9, num(pay) + " vs " + num(ex));
    }
    if (idx == 0) r.write("realization.json", io::to_json(rep));
    cases.push_back(c);
  } catch (const GluingError& e) {
    r.check("realized" + tag, false, e.what());
    cases.push_back({{"index", idx}, {"error", e.what()}});
  }
}

void run_glue(Run& r) {
  json cases = json::array();
  if (r.cfg.martingale) {
    glue_one(r, *r.cfg.martingale, 0, cases);
  } else if (r.cfg.point) {
    auto m = two_point_martingale(r.lens, *r.cfg.point);
    if (!m) throw IoError("no two-point martingale starts at the given point");
    glue_one(r, *m, 0, cases);
  } else {
    std::mt19937_64 rng(r.cfg.seed);
    Box b = bounding_box(r.lens, r.cfg.solver);
    std::uniform_real_distribution<double> ux(b.xmin, b.xmax), uy(b.ymin, b.ymax);
    for (int k = 0; k < std::max(1, r.cfg.samples); ++k) {
      std::optional<SimpleMartingale> m;
      for (int t = 0; t < 1000 && !m; ++t) {
        Point x = make_point(ux(rng), uy(rng));
        if (r.lens.contains(x) && !r.lens.on_fixed_boundary(x)) m = two_point_martingale(r.lens, x);
      }
      if (!m) {
        r.check("random martingale #" + std::to_string(k), false, "no start point found");
        continue;
      }
      glue_one(r, *m, k, cases);
    }
  }
  r.write("glue_report.json", io::detail::dump(cases));
}

void run_extend(Run& r) {
  ScalarField F = run_solve(r, false);
  ExtensionConfig ec;
  ec.shrinks = r.cfg.extension.shrinks;
  ec.concavity_tol = r.cfg.extension.concavity_tol;
  ec.reach = r.cfg.extension.reach;
  ec.concavity.seed = r.cfg.seed;
  std::optional<RegressionReport> reg;
  if (r.cfg.f.has(Regularity::c2)) {
    try {
      reg = boundary_regression(F, r.lens, r.cfg.f);
    } catch (const ExtensionError& e) {
      r.summary["regression_error"] = e.what();
    }
  }
  auto free = extend_through_free(F, r.lens, r.cfg.f, r.cfg.extension.eps, ec);
  r.write("extension_free.json", io::to_json(free, reg));
  r.write("extended_free.csv", io::field_csv(free.field));
  r.check("free-boundary extension", free.ok, free.note);
  auto fixed = extend_through_fixed(F, r.lens, r.cfg.extension.outer_margin, ec);
  r.write("extension_fixed.json", io::to_json(fixed));
  r.write("extended_fixed.csv", io::field_csv(fixed.field));
  r.check("fixed-boundary extension", fixed.ok, fixed.note);
}

void run_counterexample(Run& r) {
  const std::string& d = r.cfg.domain;
  if (d == "channel") {
    ScalarField F = run_solve(r, false);
    Point x = r.cfg.point.value_or(make_point(0.0, -1.0 / 3.0));
    auto v = F.interpolate(x);
    StepFunction phi = channel_function();
    auto mem = interval_membership(phi, r.lens);
    double pay = payoff(phi, r.cfg.f);
    json j{{"point", io::detail::point(x)},
           {"solver_value", v ? json(*v) : json(nullptr)},
           {"payoff", pay},
           {"average", io::detail::point(phi.mean())},
           {"membership", to_string(mem.verdict)},
           {"membership_margin", mem.margin}};
    r.write("strictness.json", io::detail::dump(j));
    r.check("solver value below -1e-3", v && *v <= -1e-3, v ? num(*v) : "unreached");
    r.check("payoff is zero", std::abs(pay) <= 1e-12, num(pay));
    r.check("function admissible", mem.verdict == MembershipVerdict::member, "margin " + num(mem.margin));
  } else if (d == "cheese") {
    ScalarField F = run_solve(r, false);
    const auto& g = F.grid();
    int i0 = static_cast<int>(std::lround((0.0 - g.x0) / g.h)), j0 = static_cast<int>(std::lround((0.0 - g.y0) / g.h));
    bool origin_unreached = F.masked(i0, j0) && !F.reached(i0, j0);
    LensDomain lens = r.lens;
    Evaluator zero = [lens](const Point& p) -> std::optional<double> {
      if (!lens.contains(p)) return std::nullopt;
      return 0.0;
    };
    ConcavityOptions co;
    co.tol = 1e-9;
    co.seed = r.cfg.seed;
    Box b = bounding_box(r.lens, r.cfg.solver);
    auto rep = check_local_concavity(zero, r.lens, b, r.cfg.solver.h, 1.0, co);
    json mask = json::array();
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (F.masked(i, j) && !F.reached(i, j)) mask.push_back({g.node(i, j)[0], g.node(i, j)[1]});
      }
    }
    r.write("unreached.json", io::detail::dump(mask));
    r.write("zero_concavity.json", io::to_json(rep));
    r.check("origin unreached", origin_unreached, std::to_string(mask.size()) + " unreached nodes");
    r.check("zero function locally concave", rep.passed, std::to_string(rep.segments) + " segments");
  } else {
    throw IoError("no counterexample is defined for domain '" + d + "'");
  }
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
  Run r{cfg, resolve_lens(cfg), {}, json::object()};
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw IoError("cannot create " + cfg.out + ": " + ec.message());
  r.write("config.json", emit_config(cfg));
  if (cfg.pipeline == "check") run_check(r);
  else if (cfg.pipeline == "solve") run_solve(r, true);
  else if (cfg.pipeline == "split") run_split(r);
  else if (cfg.pipeline == "glue") run_glue(r);
  else if (cfg.pipeline == "extend") run_extend(r);
  else if (cfg.pipeline == "counterexample") run_counterexample(r);
  else throw IoError("unknown pipeline '" + cfg.pipeline + "'");

  json checks = json::array();
  for (const auto& c : r.out.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    if (!c.passed) r.out.status = 1;
  }
  r.summary["pipeline"] = cfg.pipeline;
  r.summary["domain"] = cfg.domain;
  r.summary["checks"] = checks;
  r.summary["status"] = r.out.status;
  r.write("summary.json", io::detail::dump(r.summary));
  return r.out;
}

}  // namespace lensbell
