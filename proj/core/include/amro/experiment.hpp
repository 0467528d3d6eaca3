#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "amro/io.hpp"

namespace amro {

/// Graph, simulated pool and router instantiated from a scenario.
struct Deployment {
  LayeredGraph graph;
  std::shared_ptr<const AgentPool> pool;
  std::shared_ptr<const IntentRouter> router;
};

Deployment make_deployment(const Scenario& scenario);

/// Normalization bands of an idle graph.
NormBounds idle_bounds(const LayeredGraph& graph, const SamplerParams& params);

struct WarmupResult {
  SpecialistSet specialists;
  WarmupReport report;
  std::vector<double> cost_scale;  // per task, used for C_norm
};

/// Per-task warm-up against the simulator at idle load.
WarmupResult run_warmup(const Scenario& scenario, const Deployment& deployment, std::size_t iterations,
                        std::uint64_t seed);

std::vector<Query> scenario_workload(const Scenario& scenario);

/// The adaptive router (seeded with `specialists`) against WRR over the scenario workload.
StressReport run_stress(const Scenario& scenario, const Deployment& deployment, const SpecialistSet& specialists,
                        const std::vector<std::size_t>& levels, std::uint64_t seed);

}  // namespace amro
