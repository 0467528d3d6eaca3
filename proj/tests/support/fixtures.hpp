#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "amro/cost.hpp"
#include "amro/evolution.hpp"
#include "amro/graph.hpp"
#include "amro/pheromone.hpp"
#include "amro/sampler.hpp"
#include "amro/sim.hpp"

namespace amro::fixtures {

struct Fixture {
  LayeredGraph graph;
  std::shared_ptr<const AgentPool> pool;
  CostWeights cost;
};

/// 3 x 4, one task, path (2, 0, 3) has the highest quality and the lowest cost.
Fixture dominant();
inline const RoutePath kDominantPath{{2, 0, 3}};

/// 3 x 4, tasks {math, code}; optima (0, 1, 2) and (3, 2, 1) share no node.
Fixture two_task();
inline const RoutePath kMathPath{{0, 1, 2}};
inline const RoutePath kCodePath{{3, 2, 1}};

/// 3 x 4, one task, random abilities, latencies and token counts.
Fixture random(std::uint64_t seed);

struct Warmed {
  SpecialistSet specialists;
  WarmupReport report;
  std::vector<double> cost_scale;
};

/// Warm-up from uniform pheromone against the fixture's simulator.
Warmed warm(const Fixture& f, const WarmupConfig& config, const EvolutionParams& params,
            const SamplerParams& sampler, std::uint64_t seed);

/// Cost weights whose lambda matches the normalized fitness of task `task`.
CostWeights oracle_weights(const Fixture& f, const Warmed& w, std::size_t task, double lambda = 1.0);

}  // namespace amro::fixtures
