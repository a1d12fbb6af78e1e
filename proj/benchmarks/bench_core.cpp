#include <cmath>
#include <numbers>

#include <benchmark/benchmark.h>

#include "lensbell/classes.hpp"
#include "lensbell/scenarios.hpp"
#include "lensbell/solver.hpp"

using namespace lensbell;

namespace {

void BM_SolveDisk(benchmark::State& state) {
  auto lens = *canned_domain("disk_in_disk").lens;
  SolverConfig c;
  c.h = 1.0 / static_cast<double>(state.range(0));
  auto f = BoundaryFunction::cos_angle(2);
  size_t nodes = 0;
  for (auto _ : state) {
    auto F = solve_bs(lens, f, c);
    nodes = F.masked_count();
    benchmark::DoNotOptimize(F.values().data());
  }
  state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_SolveDisk)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SolveChannel(benchmark::State& state) {
  auto lens = *canned_domain("channel").lens;
  SolverConfig c;
  c.h = 0.02;
  for (auto _ : state) benchmark::DoNotOptimize(solve_bs(lens, BoundaryFunction::channel(), c).values().data());
}
BENCHMARK(BM_SolveChannel)->Unit(benchmark::kMillisecond);

void BM_IntervalMembership(benchmark::State& state) {
  auto lens = *canned_domain("disk_in_disk").lens;
  const int n = static_cast<int>(state.range(0));
  std::vector<double> br;
  std::vector<Point> vals;
  for (int k = 0; k < n; ++k) {
    br.push_back(static_cast<double>(k) / n);
    double th = 0.3 + 1.2 * std::sin(1.7 * k);
    vals.push_back(make_point(std::cos(th), std::sin(th)));
  }
  StepFunction phi(Carrier::interval, br, vals);
  for (auto _ : state) benchmark::DoNotOptimize(interval_membership(phi, lens).margin);
}
BENCHMARK(BM_IntervalMembership)->Arg(4)->Arg(16)->Arg(64);

void BM_CircleMembership(benchmark::State& state) {
  auto lens = *canned_domain("disk_in_disk").lens;
  auto hat = ConvexBody::ball(make_point(0, 0), 0.41);
  const int n = static_cast<int>(state.range(0));
  std::vector<double> br;
  std::vector<Point> vals;
  for (int k = 0; k < n; ++k) {
    br.push_back(static_cast<double>(k) / n);
    double th = 0.3 + 1.2 * std::sin(1.7 * k);
    vals.push_back(make_point(std::cos(th), std::sin(th)));
  }
  StepFunction phi(Carrier::circle, br, vals);
  for (auto _ : state) benchmark::DoNotOptimize(circle_membership(phi, lens, hat).margin);
}
BENCHMARK(BM_CircleMembership)->Arg(4)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
