#include "amro/experiment.hpp"

#include "amro/error.hpp"

namespace amro {

Deployment make_deployment(const Scenario& s) {
  LayeredGraph graph = build_graph(s.graph);
  auto pool = std::make_shared<const AgentPool>(graph, s.agents, s.theta_soft);
  return {std::move(graph), std::move(pool), scenario_router(s)};
}

NormBounds idle_bounds(const LayeredGraph& graph, const SamplerParams& params) {
  NormState norm;
  norm.seed_from(graph, params.epsilon);
  return norm.bounds();
}

WarmupResult run_warmup(const Scenario& s, const Deployment& d, std::size_t iterations, std::uint64_t seed) {
  WarmupResult out;
  out.specialists = SpecialistSet::uniform(d.graph, s.initial_pheromone);
  Rng rng(seed);
  Rng calib = rng.fork(1);
  auto outcomes = simulated_outcomes(d.graph, d.pool, s.cost.weights, calib);
  out.cost_scale = outcomes.cost_scale;
  WarmupConfig cfg = s.warmup;
  cfg.iterations = iterations;
  out.report = warmup(d.graph, out.specialists, outcomes.sources, cfg, s.evolution.params, s.sampler,
                      idle_bounds(d.graph, s.sampler), rng);
  return out;
}

std::vector<Query> scenario_workload(const Scenario& s) {
  return generate_workload(s.workload, s.graph.tasks, Vocabulary::defaults(s.graph.tasks));
}

StressReport run_stress(const Scenario& s, const Deployment& d, const SpecialistSet& specialists,
                        const std::vector<std::size_t>& levels, std::uint64_t seed) {
  specialists.check_compatible(d.graph);
  const auto queries = scenario_workload(s);

  AmroPolicyConfig amro{d.router, specialists, s.sampler, std::nullopt, make_judge(s.evolution.judge)};
  if (s.evolution.sampling_rate > 0.0) {
    EvolverConfig ec;
    ec.params = s.evolution.params;
    ec.sampling_rate = s.evolution.sampling_rate;
    ec.batch_size = s.evolution.batch_size;
    ec.cost = s.cost.weights;
    amro.evolution = ec;
  }
  StressOptions options;
  options.levels = levels;
  options.seed = seed;
  return stress_run(d.graph, *d.pool, queries, s.cost.weights, amro_policy(std::move(amro)), wrr_policy(), options);
}

}  // namespace amro
