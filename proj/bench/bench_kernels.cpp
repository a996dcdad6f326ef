#include <benchmark/benchmark.h>

#include "advsysid/certificate.hpp"
#include "advsysid/estimators.hpp"
#include "advsysid/experiments.hpp"

using namespace advsysid;

namespace {

Trajectory example1_trajectory(std::size_t d, std::size_t steps) {
  return simulate(random_system(d, 0.6, 11), example1_model(0.7), steps, 11);
}

void BM_FitL1Parallel(benchmark::State& state) {
  const auto traj = example1_trajectory(static_cast<std::size_t>(state.range(0)), 2000);
  for (auto _ : state) benchmark::DoNotOptimize(fit_l1(traj));
}

void BM_FitL1Serial(benchmark::State& state) {
  const auto traj = example1_trajectory(static_cast<std::size_t>(state.range(0)), 2000);
  for (auto _ : state) benchmark::DoNotOptimize(fit_l1_serial(traj));
}

void BM_NetParallel(benchmark::State& state) {
  const auto traj = example1_trajectory(3, 2000);
  const auto net = build_net(3, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(min_z_over(traj, net.points));
}

void BM_NetSerial(benchmark::State& state) {
  const auto traj = example1_trajectory(3, 2000);
  const auto net = build_net(3, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(min_z_over_serial(traj, net.points));
}

ExperimentConfig small_experiment() {
  ExperimentConfig c;
  c.d = 5;
  c.model = example1_model(0.7);
  c.checkpoints = {125, 250, 500};
  c.trials = 4;
  c.master_seed = 3;
  c.certify_small = false;
  return c;
}

void BM_ExperimentParallel(benchmark::State& state) {
  const auto c = small_experiment();
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c));
}

void BM_ExperimentSerial(benchmark::State& state) {
  const auto c = small_experiment();
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(c));
}

}  // namespace

BENCHMARK(BM_FitL1Parallel)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitL1Serial)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NetParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NetSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExperimentParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExperimentSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
