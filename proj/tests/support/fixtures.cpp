#include "fixtures.hpp"

#include "amro/experiment.hpp"

namespace amro::fixtures {
namespace {

NodeProfile profile(std::size_t layer, std::size_t slot, std::vector<double> ability) {
  return {{layer, slot}, "backbone-" + std::to_string(slot), "policy-" + std::to_string(layer), std::move(ability)};
}

Fixture finish(GraphConfig cfg, std::vector<AgentModel> agents, CostWeights cost) {
  LayeredGraph g = build_graph(cfg);
  auto pool = std::make_shared<const AgentPool>(g, std::move(agents), 0.8);
  return {std::move(g), std::move(pool), cost};
}

}  // namespace

Fixture dominant() {
  GraphConfig cfg;
  cfg.num_layers = 3;
  cfg.nodes_per_layer = 4;
  cfg.tasks = TaskSet({"math"});
  const double others[3][4] = {{0.30, 0.55, 0.0, 0.45}, {0.0, 0.50, 0.35, 0.60}, {0.40, 0.25, 0.55, 0.0}};
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t j = 0; j < 4; ++j) {
      const bool best = kDominantPath.slots[l] == j;
      cfg.nodes.push_back(profile(l, j, {best ? 0.95 : others[l][j]}));
    }
  }
  LayeredGraph g = build_graph(cfg);
  auto agents = default_agents(g);
  for (auto& a : agents) {
    const bool best = kDominantPath.slots[a.node.layer] == a.node.slot;
    a.latency = {best ? 0.6 : 1.0, 0.0};
    a.tokens = {best ? 150.0 : 300.0, 0.0};
    a.input_tokens = 50.0;
  }
  return finish(cfg, std::move(agents), {1e-3, 0.1, 0.0, 1.0, LoadStat::Max});
}

Fixture two_task() {
  GraphConfig cfg;
  cfg.num_layers = 3;
  cfg.nodes_per_layer = 4;
  cfg.tasks = TaskSet({"math", "code"});
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t j = 0; j < 4; ++j) {
      double math = 0.40 + 0.03 * static_cast<double>(j);
      double code = 0.45 - 0.03 * static_cast<double>(j);
      if (kMathPath.slots[l] == j) math = 0.95, code = 0.20;
      if (kCodePath.slots[l] == j) math = 0.20, code = 0.95;
      cfg.nodes.push_back(profile(l, j, {math, code}));
    }
  }
  LayeredGraph g = build_graph(cfg);
  auto agents = default_agents(g);
  for (auto& a : agents) a.input_tokens = 50.0;
  return finish(cfg, std::move(agents), {1e-3, 0.1, 0.0, 1.0, LoadStat::Max});
}

Fixture random(std::uint64_t seed) {
  GraphConfig cfg = GraphConfig::generate(3, 4, TaskSet({"task"}), seed);
  LayeredGraph g = build_graph(cfg);
  auto agents = default_agents(g);
  Rng rng(Rng::mix(seed + 17));
  for (auto& a : agents) {
    a.latency = {0.5 + rng.uniform(), 0.0};
    a.tokens = {100.0 + 300.0 * rng.uniform(), 0.0};
    a.input_tokens = 50.0;
  }
  return finish(cfg, std::move(agents), {5e-4, 0.1, 0.0, 1.0, LoadStat::Max});
}

Warmed warm(const Fixture& f, const WarmupConfig& config, const EvolutionParams& params,
            const SamplerParams& sampler, std::uint64_t seed) {
  Warmed out;
  out.specialists = SpecialistSet::uniform(f.graph, 1.0);
  Rng rng(seed);
  Rng calib = rng.fork(1);
  auto outcomes = simulated_outcomes(f.graph, f.pool, f.cost, calib);
  out.cost_scale = outcomes.cost_scale;
  out.report = warmup(f.graph, out.specialists, outcomes.sources, config, params, sampler,
                      idle_bounds(f.graph, sampler), rng);
  return out;
}

CostWeights oracle_weights(const Fixture& f, const Warmed& w, std::size_t task, double lambda) {
  CostWeights c = f.cost;
  c.lambda = lambda / w.cost_scale.at(task);
  return c;
}

}  // namespace amro::fixtures
