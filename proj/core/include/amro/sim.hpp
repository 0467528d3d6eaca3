#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "amro/cost.hpp"
#include "amro/evolution.hpp"
#include "amro/graph.hpp"
#include "amro/rng.hpp"
#include "amro/task.hpp"

namespace amro {

struct Jittered {
  double mean = 0.0;
  double jitter = 0.0;  // half-width of a uniform perturbation
};

/// Simulated agent behind one graph node.
struct AgentModel {
  NodeId node;
  std::vector<double> base_quality;  // per task, in [0,1]
  Jittered latency{1.0, 0.0};        // seconds at nominal load
  Jittered tokens{200.0, 0.0};       // output tokens
  double input_tokens = 0.0;
  double load_sensitivity = 0.0;  // quality lost per unit load above theta_soft
  double capacity = 1.0;          // concurrent requests at load 1.0
  double quality_jitter = 0.0;

  void validate(std::size_t num_tasks) const;
};

struct ExecResult {
  double quality = 0.0;
  std::uint64_t tokens_in = 0;
  std::uint64_t tokens_out = 0;
  double latency = 0.0;
};

/// Mean quality before clamping: sum_t w_t q_t - s * max(0, load - theta_soft).
double quality_mean(const AgentModel& agent, const WeightVector& w, double load, double theta_soft);
/// Latency grows linearly once load exceeds 1.
inline double latency_scale(double load) { return load > 1.0 ? load : 1.0; }

/// One execution draw. Always consumes three uniforms from `rng`.
ExecResult simulate_execute(const AgentModel& agent, const WeightVector& w, double current_load, double theta_soft,
                            Rng& rng);

/// Agent models for every node plus live in-flight counters.
class AgentPool {
 public:
  AgentPool(const LayeredGraph& graph, std::vector<AgentModel> agents, double theta_soft);
  AgentPool(const AgentPool& other);

  const AgentModel& agent(NodeId id) const { return agents_.at(flat(id)); }
  double theta_soft() const noexcept { return theta_soft_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t num_layers() const noexcept { return layers_; }

  /// Admits one request to `id`, publishes the new load to `graph`, and
  /// returns that load.
  double dispatch(NodeId id, LayeredGraph& graph);
  /// Releases one request and publishes the new load and response time.
  double complete(NodeId id, LayeredGraph& graph, double observed_latency);

  std::int64_t in_flight(NodeId id) const { return cells_[flat(id)]->in_flight; }
  double load(NodeId id) const;
  std::uint64_t total_dispatched() const;
  std::uint64_t total_completed() const;

 private:
  struct Cell {
    std::mutex mu;
    std::int64_t in_flight = 0;
    std::uint64_t dispatched = 0;
    std::uint64_t completed = 0;
  };
  std::size_t flat(NodeId id) const { return id.layer * width_ + id.slot; }

  std::size_t layers_;
  std::size_t width_;
  double theta_soft_;
  std::vector<AgentModel> agents_;
  std::vector<std::unique_ptr<Cell>> cells_;
};

/// Agents whose base quality equals the node ability profile.
std::vector<AgentModel> default_agents(const LayeredGraph& graph);

/// Analytic expectation of a path at the loads currently in `graph`.
struct PathExpectation {
  double quality = 0.0;  // mean stage quality
  CostBreakdown cost;
  double utility = 0.0;
};
PathExpectation expected_path(const LayeredGraph& graph, const AgentPool& pool, const RoutePath& path,
                              const WeightVector& w, const CostWeights& weights);

struct BestPath {
  RoutePath path;
  double utility = 0.0;
};

inline constexpr std::size_t kMaxEnumeratedPaths = 1'000'000;

/// Exhaustive argmax of expected utility; ties go to the lexicographically
/// smallest path. Throws Error(Config) beyond kMaxEnumeratedPaths.
BestPath brute_force_best_path(const LayeredGraph& graph, const AgentPool& pool, const WeightVector& w,
                               const CostWeights& weights);

/// Executes the stages of `path` back to back with no concurrent traffic.
struct Execution {
  RouteTrace trace;
  double quality = 0.0;  // mean stage quality
};
Execution execute_path(const AgentPool& pool, const RoutePath& path, const WeightVector& intent, Rng& rng,
                       std::span<const double> loads = {});

/// Smooth weighted round robin per layer.
class SmoothWrr {
 public:
  SmoothWrr(std::size_t num_layers, std::vector<double> weights);

  std::size_t next(std::size_t layer);

 private:
  std::vector<double> nominal_;
  double total_ = 0.0;
  std::vector<std::vector<double>> current_;
};

inline std::size_t route_wrr(SmoothWrr& state, std::size_t layer) { return state.next(layer); }

/// Uniform draw over a nonempty candidate set.
std::size_t route_random(std::span<const std::size_t> allowed, Rng& rng);

// ---------------------------------------------------------------------------
// Workload

/// Phrase lists used to synthesize queries; `known` phrases are what a
/// keyword router is configured with, `unknown` ones deliberately are not.
struct Vocabulary {
  std::vector<std::vector<std::string>> known;
  std::vector<std::vector<std::string>> unknown;
  std::vector<std::string> filler;

  static Vocabulary defaults(const TaskSet& tasks);
};

struct WorkloadSpec {
  WeightVector mix;
  std::size_t count = 1;
  double mixed_fraction = 0.0;    // queries blending two tasks
  double unknown_fraction = 0.0;  // queries phrased outside the known vocabulary
  std::uint64_t seed = 0;
};

struct Query {
  std::string text;
  WeightVector intent;
  std::size_t primary = 0;
};

std::vector<Query> generate_workload(const WorkloadSpec& spec, const TaskSet& tasks, const Vocabulary& vocab);

// ---------------------------------------------------------------------------
// Labeled outcomes for warm-up

/// Outcome source for `task` backed by the simulator at idle load. The
/// normalized cost divides by the largest cost seen over `calibration_paths`
/// random paths.
struct SimulatedOutcomes {
  std::vector<OutcomeSource> sources;
  std::vector<double> cost_scale;  // per task
};
SimulatedOutcomes simulated_outcomes(const LayeredGraph& graph, std::shared_ptr<const AgentPool> pool,
                                     const CostWeights& weights, Rng& rng, std::size_t calibration_paths = 100);

}  // namespace amro
