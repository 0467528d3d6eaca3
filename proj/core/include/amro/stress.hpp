#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amro/engine.hpp"
#include "amro/evolution.hpp"
#include "amro/graph.hpp"
#include "amro/router.hpp"
#include "amro/sampler.hpp"
#include "amro/sim.hpp"

namespace amro {

/// A routing strategy under test. Implementations used by the threaded
/// driver must tolerate concurrent calls.
class RoutePolicy {
 public:
  virtual ~RoutePolicy() = default;
  virtual RoutePath route(const Query& query, Rng& rng) = 0;
  /// The harness changed the telemetry of `id`.
  virtual void on_telemetry(NodeId) {}
  virtual void on_served(ServingRecord, Rng&) {}
};

/// Builds a fresh policy bound to one level's graph.
using PolicyFactory = std::function<std::unique_ptr<RoutePolicy>(LayeredGraph&)>;

struct AmroPolicyConfig {
  std::shared_ptr<const IntentRouter> router;
  SpecialistSet initial;
  SamplerParams params;
  std::optional<EvolverConfig> evolution;  // inline online evolution when set
  std::shared_ptr<const QualityJudge> judge;
};

PolicyFactory amro_policy(AmroPolicyConfig config);
/// Smooth WRR with uniform nominal weights; blind to task, load and pheromone.
PolicyFactory wrr_policy();
PolicyFactory random_policy();

struct StressOptions {
  std::vector<std::size_t> levels;
  double optimality_tolerance = 1e-9;
  std::uint64_t seed = 0;
};

struct StressLevel {
  std::size_t workers = 0;
  double wall_time = 0.0;  // seconds (virtual in the event-driven driver)
  double speedup = 1.0;    // relative to the lowest level
  double accuracy = 0.0;   // path-optimality rate
  double mean_quality = 0.0;
  double mean_cost = 0.0;
  std::size_t queries = 0;
  std::uint64_t conservation_violations = 0;
};

struct SystemStress {
  std::string system;
  std::vector<StressLevel> levels;
};

struct StressReport {
  std::vector<SystemStress> systems;
};

/// Closed-loop discrete-event run of the whole workload at one concurrency
/// level. Each worker routes its next query as soon as the previous one
/// finishes. A query counts as optimally routed when its path's expected
/// utility at decision time is within the tolerance of the brute-force best.
StressLevel run_level_des(const LayeredGraph& graph, const AgentPool& pool, std::span<const Query> queries,
                          const CostWeights& weights, const PolicyFactory& factory, std::size_t workers,
                          const StressOptions& options);

/// Same protocol with real threads: stage latencies are slept for
/// latency * time_scale seconds and the pool is shared by all workers.
StressLevel run_level_threaded(const LayeredGraph& graph, const AgentPool& pool, std::span<const Query> queries,
                               const CostWeights& weights, const PolicyFactory& factory, std::size_t workers,
                               double time_scale, const StressOptions& options);

SystemStress run_system(const std::string& name, const LayeredGraph& graph, const AgentPool& pool,
                        std::span<const Query> queries, const CostWeights& weights, const PolicyFactory& factory,
                        const StressOptions& options);

/// Runs the system under test and the baseline over identical inputs.
StressReport stress_run(const LayeredGraph& graph, const AgentPool& pool, std::span<const Query> queries,
                        const CostWeights& weights, const PolicyFactory& system, const PolicyFactory& baseline,
                        const StressOptions& options, const std::string& system_name = "amro",
                        const std::string& baseline_name = "wrr");

}  // namespace amro
