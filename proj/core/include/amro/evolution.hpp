#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "amro/cost.hpp"
#include "amro/graph.hpp"
#include "amro/heuristic.hpp"
#include "amro/pheromone.hpp"
#include "amro/rng.hpp"
#include "amro/sampler.hpp"
#include "amro/task.hpp"

namespace amro {

/// Added to every fitness so that it stays strictly positive.
inline constexpr double kFitnessFloor = 0.01;

enum class EvaporationScope { Path, Global };

struct EvolutionParams {
  double rho = 0.1;
  double Q = 1.0;
  double epsilon = 1e-6;
  EvaporationScope online_evaporation = EvaporationScope::Path;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Offline warm-up

struct LabeledOutcome {
  std::string query;
  std::size_t task = 0;
  RoutePath path;
  double score = 0.0;  // graded success in [0,1]
  RouteTrace trace;
};

/// (1 - R) + lambda * C_norm + floor; smaller is better.
double offline_fitness(double score, double normalized_cost, double lambda);
inline double offline_fitness(const LabeledOutcome& outcome, double normalized_cost, double lambda) {
  return offline_fitness(outcome.score, normalized_cost, lambda);
}

/// Evaporates every edge, reinforces the path edges (including the virtual
/// source edge) by Q / (fitness + epsilon), then applies the floor.
void offline_update(PheromoneMatrix& tau, const RoutePath& path, double fitness, const EvolutionParams& params);
/// Colony form: one evaporation, then a deposit for every path.
void offline_update(PheromoneMatrix& tau, std::span<const RoutePath> paths, std::span<const double> fitness,
                    const EvolutionParams& params);

/// Graded result of executing a path for one task.
struct GradedOutcome {
  double score = 0.0;
  double normalized_cost = 0.0;
};

/// Labeled signal source for one task.
using OutcomeSource = std::function<GradedOutcome(const RoutePath&, Rng&)>;

struct WarmupConfig {
  std::size_t iterations = 500;
  std::size_t ants_per_iteration = 1;
  double lambda = 1.0;
  std::vector<std::size_t> tasks;  // task indices to train; empty trains all
};

struct WarmupRow {
  std::size_t iteration = 0;
  std::size_t task = 0;
  double mean_fitness = 0.0;
  double modal_path_prob = 0.0;  // under the exploitation law (gamma = 0)
  RoutePath modal_path;
};

struct WarmupReport {
  std::vector<WarmupRow> rows;

  /// Last row of `task`, if any iteration ran.
  std::optional<WarmupRow> final_row(std::size_t task) const;
};

/// Trains each task's specialist independently from one-hot queries.
/// Only specialists[t] is written while training task t.
WarmupReport warmup(const LayeredGraph& graph, SpecialistSet& specialists, std::span<const OutcomeSource> sources,
                    const WarmupConfig& config, const EvolutionParams& params, const SamplerParams& sampler,
                    const NormBounds& bounds, Rng& rng);

/// Most probable full path under the selection law (exact, by dynamic
/// programming over layers).
struct ModalPath {
  RoutePath path;
  double probability = 0.0;
};
ModalPath modal_path(const PathSampler& sampler, std::size_t num_layers, std::size_t width, double gamma);

// ---------------------------------------------------------------------------
// Online bypass evolution

struct ServingRecord {
  std::string query;
  WeightVector w;
  RoutePath path;
  std::string output;
  RouteTrace trace;
  std::optional<double> quality;  // simulated or graded score, if known
};

/// FIFO of sampled serving records. Admission is Bernoulli(rate); a full
/// buffer evicts its oldest record.
class EvolutionBuffer {
 public:
  EvolutionBuffer(std::size_t capacity, double rate);

  bool enqueue(ServingRecord record, Rng& rng);
  std::size_t size() const;
  bool full() const;
  std::vector<ServingRecord> drain();
  std::vector<ServingRecord> contents() const;

  std::size_t capacity() const noexcept { return capacity_; }
  double rate() const noexcept { return rate_; }

 private:
  mutable std::mutex mu_;
  std::size_t capacity_;
  double rate_;
  std::deque<ServingRecord> records_;
};

class QualityJudge {
 public:
  virtual ~QualityJudge() = default;
  /// True when the trajectory is acceptable. May throw.
  virtual bool accept(const ServingRecord& record) const = 0;
};

class ThresholdJudge final : public QualityJudge {
 public:
  explicit ThresholdJudge(double threshold) : threshold_(threshold) {}
  bool accept(const ServingRecord& record) const override;

 private:
  double threshold_;
};

class AcceptAllJudge final : public QualityJudge {
 public:
  bool accept(const ServingRecord&) const override { return true; }
};

class RejectAllJudge final : public QualityJudge {
 public:
  bool accept(const ServingRecord&) const override { return false; }
};

struct GateStats {
  std::atomic<std::uint64_t> accepted{0};
  std::atomic<std::uint64_t> rejected{0};
  std::atomic<std::uint64_t> incidents{0};
};

/// Binary gate; judge failures count as an incident and reject.
int quality_gate(const QualityJudge& judge, const ServingRecord& record, GateStats* stats = nullptr);

/// Weighted overhead of a trace plus the fitness floor.
double system_fitness(const RouteTrace& trace, const CostWeights& weights);

/// For every record, task and path edge:
///   tau <- (1 - rho) * tau + w_t * Q / (f_sys + epsilon)
/// With Global scope the evaporation covers every edge instead of only the
/// path. The floor is applied at the end.
void online_update(SpecialistSet& specialists, std::span<const ServingRecord> batch, const CostWeights& weights,
                   const EvolutionParams& params);

struct EvolverConfig {
  EvolutionParams params;
  double sampling_rate = 0.1;
  std::size_t batch_size = 32;
  CostWeights cost;
  bool background = false;
};

struct EvolverStats {
  std::uint64_t observed = 0;
  std::uint64_t admitted = 0;
  std::uint64_t batches = 0;    // batches drained from the buffer
  std::uint64_t published = 0;  // snapshots published
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t incidents = 0;
};

/// Serving-side sampler plus the learner that turns full buffers into
/// new snapshots. In background mode one worker thread applies batches in
/// arrival order; otherwise batches apply inline in observe().
class OnlineEvolver {
 public:
  OnlineEvolver(SnapshotStore& store, std::shared_ptr<const QualityJudge> judge, EvolverConfig config);
  ~OnlineEvolver();
  OnlineEvolver(const OnlineEvolver&) = delete;
  OnlineEvolver& operator=(const OnlineEvolver&) = delete;

  /// Offers one served request; returns whether it was admitted.
  bool observe(ServingRecord record, Rng& rng);

  /// Blocks until every triggered batch has been applied.
  void flush();

  EvolverStats stats() const;
  const EvolverConfig& config() const noexcept { return config_; }

 private:
  void apply_batch(std::vector<ServingRecord> batch);
  void worker_loop(std::stop_token stop);

  SnapshotStore& store_;
  std::shared_ptr<const QualityJudge> judge_;
  EvolverConfig config_;
  EvolutionBuffer buffer_;
  GateStats gate_;
  std::atomic<std::uint64_t> observed_{0};
  std::atomic<std::uint64_t> admitted_{0};
  std::atomic<std::uint64_t> batches_{0};
  std::atomic<std::uint64_t> published_{0};

  std::mutex trigger_mu_;  // serializes buffer-full detection with draining
  std::mutex queue_mu_;
  std::condition_variable_any queue_cv_;
  std::deque<std::vector<ServingRecord>> pending_;
  std::size_t in_flight_ = 0;
  std::condition_variable idle_cv_;
  std::jthread worker_;
};

}  // namespace amro
