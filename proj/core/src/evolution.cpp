#include "amro/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "amro/error.hpp"

namespace amro {

void EvolutionParams::validate() const {
  if (!(rho >= 0.0 && rho < 1.0)) fail(ErrorKind::Config, "rho must lie in [0,1)");
  if (!(Q > 0.0 && std::isfinite(Q))) fail(ErrorKind::Config, "Q must be > 0");
  if (!(epsilon >= 0.0 && std::isfinite(epsilon))) fail(ErrorKind::Config, "epsilon must be >= 0");
}

double offline_fitness(double score, double normalized_cost, double lambda) {
  return (1.0 - std::clamp(score, 0.0, 1.0)) + lambda * normalized_cost + kFitnessFloor;
}

void offline_update(PheromoneMatrix& tau, std::span<const RoutePath> paths, std::span<const double> fitness,
                    const EvolutionParams& params) {
  params.validate();
  if (paths.size() != fitness.size()) fail(ErrorKind::Config, "one fitness value per path required");
  for (std::size_t a = 0; a < paths.size(); ++a) {
    if (!(fitness[a] > 0.0)) fail(ErrorKind::Config, "fitness must be > 0");
    if (paths[a].size() != tau.num_layers()) fail(ErrorKind::Config, "route length does not match the pheromone matrix");
  }
  const double keep = 1.0 - params.rho;
  for (double& v : tau.values()) v *= keep;
  for (std::size_t a = 0; a < paths.size(); ++a) {
    const double deposit = params.Q / (fitness[a] + params.epsilon);
    tau.for_each_path_edge(paths[a], [deposit](double& v) { v += deposit; });
  }
  tau.apply_floor();
}

void offline_update(PheromoneMatrix& tau, const RoutePath& path, double fitness, const EvolutionParams& params) {
  offline_update(tau, std::span(&path, 1), std::span(&fitness, 1), params);
}

std::optional<WarmupRow> WarmupReport::final_row(std::size_t task) const {
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->task == task) return *it;
  }
  return std::nullopt;
}

ModalPath modal_path(const PathSampler& sampler, std::size_t num_layers, std::size_t width, double gamma) {
  // best[j]: highest probability of any prefix ending at slot j of the current layer.
  std::vector<double> best(width, 0.0);
  std::vector<std::vector<std::size_t>> parent(num_layers, std::vector<std::size_t>(width, 0));

  auto law = [&](std::size_t layer, std::span<const std::size_t> prefix) {
    const auto allowed = sampler.candidates(layer);
    return exploration_mix(sampler.step(layer, prefix, allowed).p, allowed, gamma);
  };

  best = law(0, {});
  std::vector<std::size_t> prefix(num_layers, 0);
  for (std::size_t l = 1; l < num_layers; ++l) {
    std::vector<double> next(width, 0.0);
    for (std::size_t i = 0; i < width; ++i) {
      if (best[i] <= 0.0) continue;
      prefix[l - 1] = i;
      const auto mix = law(l, std::span<const std::size_t>(prefix).first(l));
      for (std::size_t j = 0; j < width; ++j) {
        const double cand = best[i] * mix[j];
        if (cand > next[j]) {
          next[j] = cand;
          parent[l][j] = i;
        }
      }
    }
    best = std::move(next);
  }

  ModalPath out;
  std::size_t end = static_cast<std::size_t>(std::max_element(best.begin(), best.end()) - best.begin());
  out.probability = best[end];
  out.path.slots.assign(num_layers, 0);
  for (std::size_t l = num_layers; l-- > 0;) {
    out.path.slots[l] = end;
    end = parent[l][end];
  }
  return out;
}

WarmupReport warmup(const LayeredGraph& graph, SpecialistSet& specialists, std::span<const OutcomeSource> sources,
                    const WarmupConfig& config, const EvolutionParams& params, const SamplerParams& sampler,
                    const NormBounds& bounds, Rng& rng) {
  params.validate();
  specialists.check_compatible(graph);
  const std::size_t k = graph.tasks().size();
  if (sources.size() != k) fail(ErrorKind::Data, "warm-up needs one outcome source per task");
  if (config.ants_per_iteration == 0) fail(ErrorKind::Config, "ants_per_iteration must be positive");

  std::vector<std::size_t> order = config.tasks;
  if (order.empty()) {
    for (std::size_t t = 0; t < k; ++t) order.push_back(t);
  }
  for (std::size_t t : order) {
    if (t >= k) fail(ErrorKind::Config, "warm-up task index out of range");
    if (!sources[t]) fail(ErrorKind::Data, "empty dataset for task '" + graph.tasks()[t] + "'");
  }

  WarmupReport report;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    for (std::size_t t : order) {
      const auto w = WeightVector::one_hot(k, t);
      const PathSampler before(graph, specialists, w, sampler, bounds);
      std::vector<RoutePath> paths;
      std::vector<double> fitness;
      double fitness_sum = 0.0;
      for (std::size_t a = 0; a < config.ants_per_iteration; ++a) {
        paths.push_back(before.sample(rng));
        const auto outcome = sources[t](paths.back(), rng);
        fitness.push_back(offline_fitness(outcome.score, outcome.normalized_cost, config.lambda));
        fitness_sum += fitness.back();
      }
      offline_update(specialists.specialists[t].tau, paths, fitness, params);
      const PathSampler after(graph, specialists, w, sampler, bounds);
      const auto modal = modal_path(after, graph.num_layers(), graph.width(), 0.0);
      report.rows.push_back({it, t, fitness_sum / static_cast<double>(config.ants_per_iteration), modal.probability,
                             modal.path});
    }
  }
  return report;
}

EvolutionBuffer::EvolutionBuffer(std::size_t capacity, double rate) : capacity_(capacity), rate_(rate) {
  if (capacity == 0) fail(ErrorKind::Config, "buffer capacity must be positive");
  if (!(rate >= 0.0 && rate <= 1.0)) fail(ErrorKind::Config, "sampling rate must lie in [0,1]");
}

bool EvolutionBuffer::enqueue(ServingRecord record, Rng& rng) {
  if (rate_ <= 0.0) return false;
  if (rate_ < 1.0 && !rng.bernoulli(rate_)) return false;
  std::lock_guard lock(mu_);
  if (records_.size() == capacity_) records_.pop_front();
  records_.push_back(std::move(record));
  return true;
}

std::size_t EvolutionBuffer::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

bool EvolutionBuffer::full() const {
  std::lock_guard lock(mu_);
  return records_.size() == capacity_;
}

std::vector<ServingRecord> EvolutionBuffer::drain() {
  std::lock_guard lock(mu_);
  std::vector<ServingRecord> out(std::make_move_iterator(records_.begin()), std::make_move_iterator(records_.end()));
  records_.clear();
  return out;
}

std::vector<ServingRecord> EvolutionBuffer::contents() const {
  std::lock_guard lock(mu_);
  return {records_.begin(), records_.end()};
}

bool ThresholdJudge::accept(const ServingRecord& record) const {
  if (!record.quality) fail(ErrorKind::Internal, "threshold judge needs a quality score");
  return *record.quality >= threshold_;
}

int quality_gate(const QualityJudge& judge, const ServingRecord& record, GateStats* stats) {
  bool ok = false;
  try {
    ok = judge.accept(record);
  } catch (...) {
    if (stats) {
      stats->incidents.fetch_add(1, std::memory_order_relaxed);
      stats->rejected.fetch_add(1, std::memory_order_relaxed);
    }
    return 0;
  }
  if (stats) (ok ? stats->accepted : stats->rejected).fetch_add(1, std::memory_order_relaxed);
  return ok ? 1 : 0;
}

double system_fitness(const RouteTrace& trace, const CostWeights& weights) {
  return path_cost(trace, weights).weighted_total + kFitnessFloor;
}

void online_update(SpecialistSet& specialists, std::span<const ServingRecord> batch, const CostWeights& weights,
                   const EvolutionParams& params) {
  params.validate();
  const std::size_t k = specialists.specialists.size();
  const double keep = 1.0 - params.rho;
  for (const auto& rec : batch) {
    if (rec.w.size() != k) fail(ErrorKind::Config, "record weights do not match the specialist set");
    const double gain = params.Q / (system_fitness(rec.trace, weights) + params.epsilon);
    for (std::size_t t = 0; t < k; ++t) {
      auto& tau = specialists.specialists[t].tau;
      if (rec.path.size() != tau.num_layers()) fail(ErrorKind::Config, "record path does not match the graph");
      const double deposit = rec.w[t] * gain;
      if (params.online_evaporation == EvaporationScope::Global) {
        for (double& v : tau.values()) v *= keep;
        tau.for_each_path_edge(rec.path, [deposit](double& v) { v += deposit; });
      } else {
        tau.for_each_path_edge(rec.path, [keep, deposit](double& v) { v = keep * v + deposit; });
      }
    }
  }
  for (auto& s : specialists.specialists) s.tau.apply_floor();
}

OnlineEvolver::OnlineEvolver(SnapshotStore& store, std::shared_ptr<const QualityJudge> judge, EvolverConfig config)
    : store_(store),
      judge_(std::move(judge)),
      config_(config),
      buffer_(config.batch_size, config.sampling_rate) {
  if (!judge_) fail(ErrorKind::Config, "online evolution needs a quality judge");
  config_.params.validate();
  if (config_.background) worker_ = std::jthread([this](std::stop_token st) { worker_loop(st); });
}

OnlineEvolver::~OnlineEvolver() {
  if (worker_.joinable()) {
    worker_.request_stop();
    queue_cv_.notify_all();
    worker_.join();
  }
}

bool OnlineEvolver::observe(ServingRecord record, Rng& rng) {
  observed_.fetch_add(1, std::memory_order_relaxed);
  std::vector<ServingRecord> batch;
  {
    std::lock_guard lock(trigger_mu_);
    if (!buffer_.enqueue(std::move(record), rng)) return false;
    if (buffer_.full()) batch = buffer_.drain();
  }
  admitted_.fetch_add(1, std::memory_order_relaxed);
  if (batch.empty()) return true;
  batches_.fetch_add(1, std::memory_order_relaxed);

  if (!config_.background) {
    apply_batch(std::move(batch));
    return true;
  }
  {
    std::lock_guard lock(queue_mu_);
    pending_.push_back(std::move(batch));
  }
  queue_cv_.notify_one();
  return true;
}

void OnlineEvolver::apply_batch(std::vector<ServingRecord> batch) {
  std::vector<ServingRecord> accepted;
  for (auto& rec : batch) {
    if (quality_gate(*judge_, rec, &gate_)) accepted.push_back(std::move(rec));
  }
  if (accepted.empty()) return;
  SpecialistSet next = *store_.load();
  online_update(next, accepted, config_.cost, config_.params);
  ++next.sequence;
  store_.publish(std::move(next));
  published_.fetch_add(1, std::memory_order_relaxed);
}

void OnlineEvolver::worker_loop(std::stop_token stop) {
  for (;;) {
    std::vector<ServingRecord> batch;
    {
      std::unique_lock lock(queue_mu_);
      if (!queue_cv_.wait(lock, stop, [this] { return !pending_.empty(); })) return;
      batch = std::move(pending_.front());
      pending_.pop_front();
      ++in_flight_;
    }
    apply_batch(std::move(batch));
    {
      std::lock_guard lock(queue_mu_);
      --in_flight_;
    }
    idle_cv_.notify_all();
  }
}

void OnlineEvolver::flush() {
  if (!config_.background) return;
  std::unique_lock lock(queue_mu_);
  idle_cv_.wait(lock, [this] { return pending_.empty() && in_flight_ == 0; });
}

EvolverStats OnlineEvolver::stats() const {
  EvolverStats s;
  s.observed = observed_.load();
  s.admitted = admitted_.load();
  s.batches = batches_.load();
  s.published = published_.load();
  s.accepted = gate_.accepted.load();
  s.rejected = gate_.rejected.load();
  s.incidents = gate_.incidents.load();
  return s;
}

}  // namespace amro
