#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json_detail.hpp"

namespace lensbell::io {

namespace detail {

json point(const Point& p) {
  json a = json::array();
  for (Eigen::Index k = 0; k < p.size(); ++k) a.push_back(p[k]);
  return a;
}

Point point(const json& j) {
  if (!j.is_array() || j.empty()) throw IoError("point must be a nonempty array");
  Point p(j.size());
  for (size_t k = 0; k < j.size(); ++k) p[k] = j[k].get<double>();
  return p;
}

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw IoError(std::string("missing key '") + key + "'");
  return j.at(key);
}

double num(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw IoError(std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

json body(const ConvexBody& b) {
  json j;
  j["kind"] = to_string(b.kind());
  switch (b.kind()) {
    case BodyKind::ball:
      j["center"] = point(b.center());
      j["radius"] = b.p0();
      break;
    case BodyKind::ellipsoid:
      j["center"] = point(b.center());
      j["axes"] = point(b.vec());
      break;
    case BodyKind::paraboloid:
      j["dim"] = b.dimension();
      j["offset"] = b.p0();
      break;
    case BodyKind::hyperbola:
      j["shift"] = b.p0();
      j["level"] = b.p1();
      break;
    case BodyKind::hyperboloid:
      j["dim"] = b.dimension();
      j["a"] = b.p0();
      break;
    case BodyKind::homothety:
      j["body"] = body(b.children()[0]);
      j["center"] = point(b.center());
      j["factor"] = b.p0();
      break;
    case BodyKind::inflation:
      j["body"] = body(b.children()[0]);
      j["margin"] = b.p0();
      break;
    case BodyKind::blend:
      j["first"] = body(b.children()[0]);
      j["second"] = body(b.children()[1]);
      j["eps"] = b.p0();
      break;
  }
  return j;
}

ConvexBody body(const json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  try {
    if (kind == "ball") return ConvexBody::ball(point(field(j, "center")), num(j, "radius"));
    if (kind == "ellipsoid") return ConvexBody::ellipsoid(point(field(j, "center")), point(field(j, "axes")));
    if (kind == "paraboloid") return ConvexBody::paraboloid(static_cast<int>(num(j, "dim")), num(j, "offset"));
    if (kind == "hyperbola") return ConvexBody::hyperbola(num(j, "shift"), num(j, "level"));
    if (kind == "hyperboloid") return ConvexBody::hyperboloid(static_cast<int>(num(j, "dim")), num(j, "a"));
    if (kind == "homothety") {
      return ConvexBody::homothety(body(field(j, "body")), point(field(j, "center")), num(j, "factor"));
    }
    if (kind == "inflation") return ConvexBody::inflation(body(field(j, "body")), num(j, "margin"));
    if (kind == "blend") return ConvexBody::blend(body(field(j, "first")), body(field(j, "second")), num(j, "eps"));
  } catch (const GeometryError& e) {
    throw IoError(std::string("invalid ") + kind + ": " + e.what());
  }
  throw IoError("unknown body kind '" + kind + "'");
}

json lens(const LensDomain& l) {
  json j;
  j["outer"] = body(l.outer());
  j["holes"] = json::array();
  for (const auto& h : l.holes()) j["holes"].push_back(body(h));
  j["closed"] = l.closed_variant();
  return j;
}

LensDomain lens(const json& j) {
  std::vector<ConvexBody> holes;
  for (const auto& h : field(j, "holes")) holes.push_back(body(h));
  bool closed = j.contains("closed") && j.at("closed").get<bool>();
  try {
    return LensDomain(body(field(j, "outer")), std::move(holes), closed);
  } catch (const GeometryError& e) {
    throw IoError(std::string("invalid lens: ") + e.what());
  }
}

json function(const BoundaryFunction& f) {
  json j;
  j["kind"] = f.kind;
  j["params"] = f.params;
  return j;
}

BoundaryFunction function(const json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  std::vector<double> p = j.contains("params") ? j.at("params").get<std::vector<double>>() : std::vector<double>{};
  auto need = [&](size_t n) {
    if (p.size() != n) throw IoError("function '" + kind + "' takes " + std::to_string(n) + " parameters");
  };
  if (kind == "zero") return need(0), BoundaryFunction::zero();
  if (kind == "channel") return need(0), BoundaryFunction::channel();
  if (kind == "affine") {
    if (p.size() < 2) throw IoError("affine function needs coefficients and a constant");
    Point c(p.size() - 1);
    for (size_t k = 0; k + 1 < p.size(); ++k) c[k] = p[k];
    return BoundaryFunction::affine(c, p.back());
  }
  if (kind == "exp") return need(2), BoundaryFunction::exp_coordinate(static_cast<int>(p[0]), p[1]);
  if (kind == "indicator") return need(2), BoundaryFunction::indicator_coordinate(static_cast<int>(p[0]), p[1]);
  if (kind == "power") return need(2), BoundaryFunction::power_coordinate(static_cast<int>(p[0]), p[1]);
  if (kind == "cos_angle") return need(1), BoundaryFunction::cos_angle(static_cast<int>(p[0]));
  throw IoError("unknown function kind '" + kind + "'");
}

json step(const StepFunction& phi) {
  json j;
  j["carrier"] = to_string(phi.carrier());
  j["breakpoints"] = phi.breakpoints();
  j["values"] = json::array();
  for (const auto& v : phi.values()) j["values"].push_back(point(v));
  return j;
}

StepFunction step(const json& j) {
  const std::string c = field(j, "carrier").get<std::string>();
  Carrier carrier;
  if (c == "interval") carrier = Carrier::interval;
  else if (c == "circle") carrier = Carrier::circle;
  else throw IoError("unknown carrier '" + c + "'");
  std::vector<Point> values;
  for (const auto& v : field(j, "values")) values.push_back(point(v));
  try {
    return StepFunction(carrier, field(j, "breakpoints").get<std::vector<double>>(), std::move(values));
  } catch (const ClassError& e) {
    throw IoError(std::string("invalid step function: ") + e.what());
  }
}

namespace {

json node(const MartingaleNode& n) {
  json j;
  j["mass"] = n.mass;
  j["value"] = point(n.value);
  j["children"] = json::array();
  for (const auto& c : n.children) j["children"].push_back(node(c));
  return j;
}

MartingaleNode node(const json& j) {
  MartingaleNode n;
  n.mass = num(j, "mass");
  n.value = point(field(j, "value"));
  if (j.contains("children")) {
    for (const auto& c : j.at("children")) n.children.push_back(node(c));
  }
  return n;
}

}  // namespace

json martingale(const SimpleMartingale& m) { return node(m.root); }

SimpleMartingale martingale(const json& j) {
  SimpleMartingale m{node(j)};
  if (std::abs(m.root.mass - 1.0) > 1e-12) throw IoError("root mass must be 1");
  return m;
}

json parse(const std::string& doc) {
  try {
    return json::parse(doc);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed JSON: ") + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

using detail::json;

namespace {

template <class T, class F>
T guarded(F&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw IoError(std::string("bad document: ") + e.what());
  }
}

json issues(const std::vector<Issue>& v) {
  json a = json::array();
  for (const auto& i : v) a.push_back({{"path", i.path}, {"message", i.message}});
  return a;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_json(const ConvexBody& b) { return detail::dump(detail::body(b)); }
ConvexBody body_from_json(const std::string& doc) {
  return guarded<ConvexBody>([&] { return detail::body(detail::parse(doc)); });
}

std::string to_json(const LensDomain& l) { return detail::dump(detail::lens(l)); }
LensDomain lens_from_json(const std::string& doc) {
  return guarded<LensDomain>([&] { return detail::lens(detail::parse(doc)); });
}

std::string to_json(const BoundaryFunction& f) { return detail::dump(detail::function(f)); }
BoundaryFunction function_from_json(const std::string& doc) {
  return guarded<BoundaryFunction>([&] { return detail::function(detail::parse(doc)); });
}

std::string to_json(const StepFunction& phi) { return detail::dump(detail::step(phi)); }
StepFunction step_from_json(const std::string& doc) {
  return guarded<StepFunction>([&] { return detail::step(detail::parse(doc)); });
}

std::string to_json(const SimpleMartingale& m) { return detail::dump(detail::martingale(m)); }
SimpleMartingale martingale_from_json(const std::string& doc) {
  return guarded<SimpleMartingale>([&] { return detail::martingale(detail::parse(doc)); });
}

std::string to_json(const std::vector<TraceEntry>& trace) {
  json a = json::array();
  for (const auto& t : trace) {
    a.push_back({{"path", t.path},
                 {"interval", {t.s, t.e}},
                 {"average", detail::point(t.average)},
                 {"t", t.t},
                 {"ratio", t.ratio},
                 {"bound", t.bound},
                 {"depth", t.depth}});
  }
  return detail::dump(a);
}

std::string to_json(const MembershipReport& r) {
  json j{{"verdict", to_string(r.verdict)},
         {"margin", r.margin},
         {"polygons_checked", r.polygons_checked},
         {"windings_checked", r.windings_checked},
         {"note", r.note}};
  if (r.witness) j["witness"] = {r.witness->first, r.witness->second};
  if (r.witness_average) j["witness_average"] = detail::point(*r.witness_average);
  return detail::dump(j);
}

std::string to_json(const MartingaleReport& r) {
  return detail::dump({{"valid", r.valid}, {"min_clearance", r.min_clearance}, {"issues", issues(r.issues)}});
}

std::string to_json(const RealizationReport& r) {
  json j{{"found", r.found},
         {"orderings_tried", r.orderings_tried},
         {"best_margin", r.best_margin},
         {"note", r.note},
         {"eps", r.hat.eps},
         {"critical_eps", r.hat.critical_eps},
         {"hat_margin", r.hat.margin},
         {"verifier", detail::parse(to_json(r.verifier))}};
  j["hat_holes"] = json::array();
  for (const auto& b : r.hat.bodies) j["hat_holes"].push_back(detail::body(b));
  if (r.function) j["function"] = detail::step(*r.function);
  return detail::dump(j);
}

std::string to_json(const ConcavityReport& r) {
  json v = json::array();
  for (const auto& x : r.violations) {
    v.push_back({{"a", detail::point(x.a)}, {"b", detail::point(x.b)}, {"t", x.t}, {"defect", x.defect}});
  }
  return detail::dump({{"passed", r.passed},
                       {"segments", r.segments},
                       {"skipped", r.skipped},
                       {"worst_defect", r.worst_defect},
                       {"violations", v}});
}

std::string to_json(const std::vector<ConditionReport>& reports) {
  json a = json::array();
  for (const auto& r : reports) {
    json w = json::array();
    for (const auto& p : r.witnesses) w.push_back(detail::point(p));
    a.push_back({{"condition", r.condition},
                 {"verdict", to_string(r.verdict)},
                 {"samples", r.samples},
                 {"note", r.note},
                 {"witnesses", w}});
  }
  return detail::dump(a);
}

std::string to_json(const ExtensionResult& r, const std::optional<RegressionReport>& regression) {
  json w = json::array();
  for (const auto& x : r.witnesses) {
    w.push_back({{"query", detail::point(x.query)},
                 {"minimizer", detail::point(x.minimizer)},
                 {"coeffs", detail::point(x.functional.coeffs)},
                 {"value", x.functional.value},
                 {"provenance", to_string(x.functional.provenance)}});
  }
  json j{{"ok", r.ok},
         {"level", r.level},
         {"tried", r.tried},
         {"note", r.note},
         {"lens", detail::lens(r.lens)},
         {"concavity", detail::parse(to_json(r.concavity))},
         {"witnesses", w}};
  if (regression) {
    j["regression"] = {{"degenerate", regression->degenerate},
                       {"free_exponent", regression->free_exponent},
                       {"contact_exponent", regression->contact_exponent},
                       {"free_pairs", regression->free_pairs},
                       {"contact_points", regression->contact_points},
                       {"max_gap", regression->max_gap},
                       {"note", regression->note}};
  }
  return detail::dump(j);
}

std::string field_csv(const ScalarField& field) {
  std::ostringstream os;
  os << "x,y,value\n";
  const auto& g = field.grid();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!field.masked(i, j)) continue;
      Point p = g.node(i, j);
      os << fmt(p[0]) << ',' << fmt(p[1]) << ',';
      if (field.reached(i, j)) os << fmt(field.at(i, j));
      else os << "UNREACHED";
      os << '\n';
    }
  }
  return os.str();
}

std::string field_meta_json(const ScalarField& field) {
  const auto& g = field.grid();
  const auto& m = field.meta;
  return detail::dump({{"grid", {{"x0", g.x0}, {"y0", g.y0}, {"h", g.h}, {"nx", g.nx}, {"ny", g.ny}}},
                       {"masked", field.masked_count()},
                       {"reached", field.reached_count()},
                       {"iterations", m.iterations},
                       {"last_update", m.last_update},
                       {"updates", m.updates},
                       {"boundary_samples", m.boundary_samples},
                       {"seeded_nodes", m.seeded_nodes},
                       {"directions", m.directions},
                       {"converged", m.converged}});
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace lensbell::io
