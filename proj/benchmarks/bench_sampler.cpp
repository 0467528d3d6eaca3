#include <benchmark/benchmark.h>

#include "amro/experiment.hpp"
#include "amro/sampler.hpp"
#include "amro/sim.hpp"

namespace {

using namespace amro;

const TaskSet kTasks({"math", "code", "general"});

struct Setup {
  LayeredGraph graph;
  std::shared_ptr<const AgentPool> pool;
  SpecialistSet specialists;
  NormBounds bounds;
};

Setup make_setup(std::size_t layers, std::size_t width) {
  auto g = build_graph(GraphConfig::generate(layers, width, kTasks, 1));
  auto pool = std::make_shared<const AgentPool>(g, default_agents(g), 0.8);
  auto sp = SpecialistSet::uniform(g, 1.0);
  Rng rng(2);
  for (auto& s : sp.specialists) {
    for (double& v : s.tau.values()) v = rng.uniform(0.1, 2.0);
  }
  auto bounds = idle_bounds(g, SamplerParams{});
  return {std::move(g), std::move(pool), std::move(sp), bounds};
}

void BM_FusePheromone(benchmark::State& state) {
  const auto s = make_setup(4, static_cast<std::size_t>(state.range(0)));
  const WeightVector w({0.5, 0.3, 0.2});
  for (auto _ : state) benchmark::DoNotOptimize(fuse_pheromone(s.specialists.specialists, w));
}
BENCHMARK(BM_FusePheromone)->Arg(4)->Arg(16)->Arg(64);

void BM_SamplerConstruct(benchmark::State& state) {
  const auto s = make_setup(4, static_cast<std::size_t>(state.range(0)));
  const WeightVector w({0.5, 0.3, 0.2});
  for (auto _ : state) {
    PathSampler sampler(s.graph, s.specialists, w, SamplerParams{}, s.bounds);
    benchmark::DoNotOptimize(&sampler);
  }
}
BENCHMARK(BM_SamplerConstruct)->Arg(4)->Arg(16)->Arg(64);

void BM_SamplePath(benchmark::State& state) {
  const auto s = make_setup(4, static_cast<std::size_t>(state.range(0)));
  const PathSampler sampler(s.graph, s.specialists, WeightVector({0.5, 0.3, 0.2}), SamplerParams{}, s.bounds);
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(rng));
}
BENCHMARK(BM_SamplePath)->Arg(4)->Arg(16)->Arg(64);

void BM_WarmupIteration(benchmark::State& state) {
  auto s = make_setup(3, 4);
  Rng calib(4);
  const auto outcomes = simulated_outcomes(s.graph, s.pool, CostWeights{}, calib);
  WarmupConfig config;
  config.iterations = 1;
  config.ants_per_iteration = static_cast<std::size_t>(state.range(0));
  config.tasks = {0};
  Rng rng(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        warmup(s.graph, s.specialists, outcomes.sources, config, EvolutionParams{}, SamplerParams{}, s.bounds, rng));
  }
}
BENCHMARK(BM_WarmupIteration)->Arg(1)->Arg(16)->Arg(64);

void BM_BruteForce(benchmark::State& state) {
  const auto s = make_setup(3, static_cast<std::size_t>(state.range(0)));
  const WeightVector w({1.0, 0.0, 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_best_path(s.graph, *s.pool, w, CostWeights{}));
}
BENCHMARK(BM_BruteForce)->Arg(3)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
