#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "amro/evolution.hpp"
#include "amro/graph.hpp"
#include "amro/heuristic.hpp"
#include "amro/pheromone.hpp"
#include "amro/router.hpp"
#include "amro/sampler.hpp"
#include "amro/sim.hpp"

namespace amro {

struct RouteDecision {
  WeightVector w;
  bool low_confidence = false;
  RoutePath path;
  std::uint64_t snapshot_sequence = 0;
  PathStats stats;
};

/// Serving path: intent weights -> fused pheromone and heuristic -> path.
/// Never writes pheromone; learning goes through an OnlineEvolver bound to
/// snapshots().
class AmroEngine {
 public:
  AmroEngine(LayeredGraph& graph, std::shared_ptr<const IntentRouter> router, SpecialistSet initial,
             SamplerParams params);

  RouteDecision route(std::string_view query, Rng& rng) const;

  /// Telemetry write that also feeds the normalization windows.
  void observe(NodeId id, const TelemetryObservation& obs);
  /// Pushes the node's current load and response-time signals.
  void record_signals(NodeId id);

  LayeredGraph& graph() noexcept { return graph_; }
  const LayeredGraph& graph() const noexcept { return graph_; }
  const IntentRouter& router() const noexcept { return *router_; }
  SnapshotStore& snapshots() noexcept { return store_; }
  const SnapshotStore& snapshots() const noexcept { return store_; }
  NormState& norm() noexcept { return norm_; }
  const SamplerParams& params() const noexcept { return params_; }

 private:
  LayeredGraph& graph_;
  std::shared_ptr<const IntentRouter> router_;
  SnapshotStore store_;
  NormState norm_;
  SamplerParams params_;
};

/// One served request of the sequential serving loop.
struct ServedQuery {
  std::size_t index = 0;
  std::string query;
  RouteDecision decision;
  double quality = 0.0;
  CostBreakdown cost;
  double utility = 0.0;
};

struct ServeSummary {
  std::vector<ServedQuery> served;
  double mean_quality = 0.0;
  double mean_cost = 0.0;
  double mean_utility = 0.0;
};

/// Serves queries one at a time against the simulated pool and offers each
/// served request to `evolver` when given. Deterministic for a fixed seed
/// when the evolver runs inline.
ServeSummary serve_sequential(AmroEngine& engine, const AgentPool& pool, std::span<const Query> queries,
                              const CostWeights& weights, OnlineEvolver* evolver, std::uint64_t seed);

}  // namespace amro
