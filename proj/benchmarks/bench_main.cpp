#include <benchmark/benchmark.h>

#include <algorithm>
#include <limits>
#include <memory>
#include <random>

#include "adaptivefog/harness.hpp"
#include "adaptivefog/latency_model.hpp"
#include "adaptivefog/mobility.hpp"
#include "adaptivefog/policy.hpp"
#include "adaptivefog/synth.hpp"

using namespace adaptivefog;

namespace {

struct Fitted {
  std::vector<RttSample> samples;
  GridSpec grid;
  std::shared_ptr<const LatencyModel> model;
  MobilityModel mobility;
};

const Fitted& city() {
  static const Fitted f = [] {
    Fitted out;
    out.samples = generate(preset("city-drive-2mno"), 100000);
    out.grid.origin_lat = std::numeric_limits<double>::infinity();
    out.grid.origin_lon = std::numeric_limits<double>::infinity();
    for (const auto& s : out.samples) {
      out.grid.origin_lat = std::min(out.grid.origin_lat, s.latitude);
      out.grid.origin_lon = std::min(out.grid.origin_lon, s.longitude);
    }
    out.model = std::make_shared<const LatencyModel>(fit_model(out.samples, out.grid));
    out.mobility = estimate_transitions(out.samples, out.grid);
    return out;
  }();
  return f;
}

SwitchProblem city_problem(Horizon horizon, SwitchCost cost = SwitchCost::scalar(0.2)) {
  const auto& f = city();
  return make_switch_problem(f.mobility, f.model, ServiceSet::defaults(), cost, 0.9, horizon, Server::Fog);
}

void BM_Generate(benchmark::State& state) {
  const auto spec = preset("city-drive-2mno");
  for (auto _ : state) benchmark::DoNotOptimize(generate(spec, state.range(0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Generate)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_FitModel(benchmark::State& state) {
  const auto& f = city();
  for (auto _ : state) benchmark::DoNotOptimize(fit_model(f.samples, f.grid));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.samples.size()));
}
BENCHMARK(BM_FitModel)->Unit(benchmark::kMillisecond);

void BM_EstimateTransitions(benchmark::State& state) {
  const auto& f = city();
  for (auto _ : state) benchmark::DoNotOptimize(estimate_transitions(f.samples, f.grid));
}
BENCHMARK(BM_EstimateTransitions)->Unit(benchmark::kMillisecond);

void BM_KrDistance(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::lognormal_distribution<double> d(4.4, 0.4);
  std::vector<double> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  for (auto& x : a) x = d(rng);
  for (auto& x : b) x = d(rng);
  const EmpiricalCdf f(a), g(b);
  const auto services = ServiceSet::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(kr_distance(f, g, services));
}
BENCHMARK(BM_KrDistance)->Arg(1000)->Arg(100000);

void BM_SolveFinite(benchmark::State& state) {
  const auto p = city_problem(FiniteHorizon{static_cast<int>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(solve_finite(p));
  state.counters["states"] = static_cast<double>(p.mobility.size());
}
BENCHMARK(BM_SolveFinite)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_SolveInfinite(benchmark::State& state) {
  const auto p = city_problem(InfiniteHorizon{});
  InfiniteOptions opts;
  opts.method = state.range(0) == 0 ? InfiniteOptions::Method::ValueIteration
                                    : InfiniteOptions::Method::DeltaFixedPoint;
  for (auto _ : state) benchmark::DoNotOptimize(solve_infinite(p, opts));
  state.counters["states"] = static_cast<double>(p.mobility.size());
}
BENCHMARK(BM_SolveInfinite)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_EvaluatePolicy(benchmark::State& state) {
  const auto p = city_problem(InfiniteHorizon{});
  const auto pol = solve_infinite(p);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_policy(p, pol));
}
BENCHMARK(BM_EvaluatePolicy)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
