// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "routelogit/comparison.hpp"
#include "routelogit/estimation.hpp"
#include "routelogit/io.hpp"
#include "routelogit/recursive_logit.hpp"
#include "routelogit/simulation.hpp"

using namespace routelogit;

namespace {

const NetworkModel& example() {
  static const NetworkModel m =
      load_network_file(std::string(ROUTELOGIT_DATA_DIR) + "/three_node.json");
  return m;
}

const ValueFunction& solved() {
  static const ValueFunction vf = solve_value_functions(
      example().network, example().support_points, {},
      origin_state(example().network, example().support_points));
  return vf;
}

void BM_SimulateSerial(benchmark::State& state) {
  RecursiveSampler sampler(solved());
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_counts_serial(sampler, state.range(0), 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateParallel(benchmark::State& state) {
  RecursiveSampler sampler(solved());
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_counts(sampler, state.range(0), 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

SweepGrid grid() { return {2, 3, {-1.8, 5, 18}, {-2.7, 5, 16}, {0.05, 0.95, 7}}; }

void BM_SweepSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sweep_serial(grid()));
}

void BM_SweepParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sweep(grid()));
}

const LikelihoodEvaluator& evaluator() {
  static const ObservationSet obs =
      simulate_sequences(RecursiveSampler(solved()), 20'000, 3);
  static const LikelihoodEvaluator ev(example().network, example().support_points,
                                      obs, Model::recursive);
  return ev;
}

void BM_LogLikelihoodSerial(benchmark::State& state) {
  const std::vector<double> beta{-1.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluator().log_likelihood_serial(beta, 1.0));
}

void BM_LogLikelihoodParallel(benchmark::State& state) {
  const std::vector<double> beta{-1.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluator().log_likelihood(beta, 1.0));
}

}  // namespace

BENCHMARK(BM_SimulateSerial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogLikelihoodSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LogLikelihoodParallel)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
