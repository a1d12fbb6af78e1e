#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <regex>

#include <gtest/gtest.h>

#include "lensbell/io.hpp"
#include "lensbell/scenarios.hpp"

using namespace lensbell;
namespace fs = std::filesystem;

namespace {

LensDomain disk_lens(double r) {
  return LensDomain(ConvexBody::ball(make_point(0, 0), 1.0), ConvexBody::ball(make_point(0, 0), r));
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("lensbell_io_" + name);
  fs::remove_all(p);
  return p;
}

size_t count(const std::string& s, const std::string& needle) {
  size_t n = 0;
  for (size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Json, BodiesRoundTrip) {
  auto ball = ConvexBody::ball(make_point(0.1, 0.2), 0.7);
  std::vector<ConvexBody> bodies = {
      ball,
      ConvexBody::ellipsoid(make_point(0, 0), make_point(1, 0.5)),
      ConvexBody::paraboloid(2, 1.0),
      ConvexBody::hyperbola(0.5, 2.0),
      ConvexBody::hyperboloid(2, 1.0),
      ConvexBody::homothety(ball, make_point(0, 0), 0.8),
      ConvexBody::inflation(ball, 0.2),
      ConvexBody::blend(ball, ConvexBody::ball(make_point(0, 0), 0.2), 0.3),
  };
  for (const auto& b : bodies) {
    auto doc = io::to_json(b);
    auto back = io::body_from_json(doc);
    EXPECT_EQ(io::to_json(back), doc);
    for (const auto& p : {make_point(0.3, 1.5), make_point(-0.2, 0.1), make_point(2, 3)}) {
      EXPECT_NEAR(back.signed_distance(p), b.signed_distance(p), 1e-12) << b.describe();
    }
  }
}

TEST(Json, LensAndFunctions) {
  auto lens = *canned_domain("channel").lens;
  auto doc = io::to_json(lens);
  auto back = io::lens_from_json(doc);
  EXPECT_EQ(back.holes().size(), 2u);
  EXPECT_EQ(io::to_json(back), doc);

  for (const auto& f : {BoundaryFunction::channel(), BoundaryFunction::cos_angle(2), BoundaryFunction::exp_coordinate(1, 0.5),
                        BoundaryFunction::affine(make_point(1, -2), 3), BoundaryFunction::indicator_coordinate(0, 0.1),
                        BoundaryFunction::power_coordinate(0, 1.5), BoundaryFunction::zero()}) {
    auto g = io::function_from_json(io::to_json(f));
    EXPECT_EQ(g.kind, f.kind);
    for (const auto& p : {make_point(0.6, 0.8), make_point(-0.8, 0.6), make_point(0, -1)}) {
      EXPECT_EQ(g(p), f(p)) << f.kind;
    }
  }
}

TEST(Json, StepAndMartingale) {
  auto phi = channel_function();
  auto back = io::step_from_json(io::to_json(phi));
  EXPECT_EQ(back.pieces(), 3u);
  EXPECT_EQ(io::to_json(back), io::to_json(phi));

  auto m = two_point_martingale(disk_lens(0.5), make_point(0.1, -0.7));
  ASSERT_TRUE(m);
  auto mb = io::martingale_from_json(io::to_json(*m));
  EXPECT_EQ(io::to_json(mb), io::to_json(*m));
  EXPECT_TRUE(terminal_distribution(mb).equals(terminal_distribution(*m), 0.0, 0.0));
}

TEST(Json, RejectsBadDocuments) {
  EXPECT_THROW(io::body_from_json("{"), io::IoError);
  EXPECT_THROW(io::body_from_json(R"({"kind": "torus"})"), io::IoError);
  EXPECT_THROW(io::martingale_from_json(R"({"mass": 0.5, "value": [0, 1], "children": []})"), io::IoError);
}

TEST(Config, ExamplesRoundTrip) {
  for (const auto& d : canned_domains()) {
    if (d.read_only) {
      EXPECT_THROW(example_config(d.name), io::IoError);
      continue;
    }
    auto cfg = example_config(d.name);
    auto once = emit_config(cfg);
    auto twice = emit_config(parse_config(once));
    EXPECT_EQ(once, twice) << d.name;
  }
}

TEST(Config, ShippedConfigsParse) {
  fs::path dir = fs::path(LENSBELL_SOURCE_DIR) / "configs";
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    auto doc = io::read_file(e.path().string());
    auto cfg = parse_config(doc);
    EXPECT_EQ(emit_config(parse_config(emit_config(cfg))), emit_config(cfg)) << e.path();
    ++n;
  }
  EXPECT_GE(n, 9);
}

TEST(Config, Malformed) {
  EXPECT_THROW(parse_config("{ not json"), io::IoError);
  EXPECT_THROW(parse_config(R"({"pipeline": "solve"})"), io::IoError);
  EXPECT_THROW(parse_config(R"({"pipeline": "solve", "domain": "channel", "colour": 1})"), io::IoError);
  EXPECT_THROW(parse_config(R"({"pipeline": "dance", "domain": "channel"})"), io::IoError);
  EXPECT_THROW(parse_config(R"({"pipeline": "glue", "domain": "disk_in_disk"})"), io::IoError);
  EXPECT_THROW(parse_config(R"({"pipeline": "solve", "domain": "nowhere"})"), io::IoError);
  EXPECT_THROW(parse_config(R"({"pipeline": "solve", "domain": "channel", "solver": {"h": -1}})"), std::exception);
  EXPECT_NO_THROW(parse_config(R"({"pipeline": "glue", "domain": "disk_in_disk", "seed": 3})"));
}

TEST(Heatmap, HatchCountMatchesUnreached) {
  auto cheese = *canned_domain("cheese").lens;
  SolverConfig c;
  c.h = 0.04;
  auto F = solve_bs(cheese, BoundaryFunction::zero(), c);
  auto svg = heatmap_svg(F, cheese);
  size_t unreached = F.masked_count() - F.reached_count();
  EXPECT_GT(unreached, 0u);
  EXPECT_EQ(count(svg, "fill=\"url(#hatch)\""), unreached);
  EXPECT_EQ(count(svg, "<polyline"), 4u);
}

TEST(Heatmap, AffineIsMonotone) {
  auto lens = disk_lens(0.4);
  SolverConfig c;
  c.h = 0.04;
  auto F = solve_bs(lens, BoundaryFunction::affine(make_point(1, 0), 0), c);
  auto svg = heatmap_svg(F, lens);
  // red channel along each pixel row grows with x
  std::regex rect(R"re(<rect x="([0-9.]+)" y="([0-9.]+)" width="4" height="4" fill="rgb\((\d+),64,(\d+)\)"/>)re");
  std::map<std::string, std::vector<std::pair<double, int>>> rows;
  size_t cells = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), rect); it != std::sregex_iterator(); ++it) {
    rows[(*it)[2]].push_back({std::stod((*it)[1]), std::stoi((*it)[3])});
    ++cells;
  }
  EXPECT_EQ(cells, F.reached_count());
  for (auto& [y, row] : rows) {
    std::sort(row.begin(), row.end());
    for (size_t k = 1; k < row.size(); ++k) EXPECT_GE(row[k].second, row[k - 1].second) << "row " << y;
  }
}

TEST(Heatmap, EmptyMaskDrawsBoundariesOnly) {
  auto lens = disk_lens(0.4);
  GridSpec g{-1, -1, 0.1, 21, 21};
  ScalarField F(g, std::vector<std::uint8_t>(g.size(), 0));
  auto svg = heatmap_svg(F, lens);
  EXPECT_EQ(count(svg, "<rect x="), 0u);
  EXPECT_EQ(count(svg, "<polyline"), 2u);
}

TEST(Csv, UnreachedNodesMarked) {
  GridSpec g{0, 0, 1, 2, 1};
  ScalarField F(g, {1, 1});
  F.at(0, 0) = 0.5;
  auto csv = io::field_csv(F);
  EXPECT_EQ(csv.rfind("x,y,value\n", 0), 0u);
  EXPECT_EQ(count(csv, "UNREACHED"), 1u);
}

TEST(Scenario, CheckExitStatus) {
  auto cfg = example_config("cone_fail");
  cfg.out = scratch("cone").string();
  auto out = run_scenario(cfg);
  EXPECT_EQ(out.status, 1);
  cfg = example_config("hyperbola_pair");
  cfg.out = scratch("pair").string();
  EXPECT_EQ(run_scenario(cfg).status, 0);
}

TEST(Scenario, DeterministicOutputs) {
  auto cfg = example_config("disk_in_disk");
  cfg.pipeline = "solve";
  cfg.solver.h = 0.05;
  cfg.out = scratch("det_a").string();
  auto ra = run_scenario(cfg);
  cfg.out = scratch("det_b").string();
  auto rb = run_scenario(cfg);
  ASSERT_EQ(ra.files.size(), rb.files.size());
  for (size_t k = 0; k < ra.files.size(); ++k) {
    auto name = fs::path(ra.files[k]).filename();
    EXPECT_EQ(name, fs::path(rb.files[k]).filename());
    if (name == "config.json") continue;  // records the output directory
    EXPECT_EQ(io::read_file(ra.files[k]), io::read_file(rb.files[k])) << name;
  }
}
