#include "amro/stress.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <queue>
#include <thread>

#include "amro/error.hpp"

namespace amro {
namespace {

class AmroPolicy final : public RoutePolicy {
 public:
  AmroPolicy(LayeredGraph& graph, const AmroPolicyConfig& cfg)
      : engine_(graph, cfg.router, cfg.initial, cfg.params) {
    if (cfg.evolution) {
      auto judge = cfg.judge ? cfg.judge : std::make_shared<const AcceptAllJudge>();
      evolver_ = std::make_unique<OnlineEvolver>(engine_.snapshots(), std::move(judge), *cfg.evolution);
    }
  }

  RoutePath route(const Query& query, Rng& rng) override { return engine_.route(query.text, rng).path; }
  void on_telemetry(NodeId id) override { engine_.record_signals(id); }
  void on_served(ServingRecord record, Rng& rng) override {
    if (!evolver_) return;
    record.w = engine_.router().infer(record.query).weights;
    evolver_->observe(std::move(record), rng);
  }

 private:
  AmroEngine engine_;
  std::unique_ptr<OnlineEvolver> evolver_;
};

class WrrPolicy final : public RoutePolicy {
 public:
  explicit WrrPolicy(const LayeredGraph& graph)
      : layers_(graph.num_layers()), wrr_(graph.num_layers(), std::vector<double>(graph.width(), 1.0)) {}

  RoutePath route(const Query&, Rng&) override {
    std::lock_guard lock(mu_);
    RoutePath p;
    for (std::size_t l = 0; l < layers_; ++l) p.slots.push_back(route_wrr(wrr_, l));
    return p;
  }

 private:
  std::mutex mu_;
  std::size_t layers_;
  SmoothWrr wrr_;
};

class RandomPolicy final : public RoutePolicy {
 public:
  explicit RandomPolicy(const LayeredGraph& graph) : graph_(graph) {}

  RoutePath route(const Query&, Rng& rng) override {
    RoutePath p;
    for (std::size_t l = 0; l < graph_.num_layers(); ++l) {
      auto allowed = allowed_in_layer(graph_, l, std::numeric_limits<double>::infinity());
      p.slots.push_back(route_random(allowed, rng));
    }
    return p;
  }

 private:
  const LayeredGraph& graph_;
};

Rng query_rng(std::uint64_t seed, std::size_t index) { return Rng(Rng::mix(seed ^ Rng::mix(index + 1))); }

bool routed_optimally(const LayeredGraph& graph, const AgentPool& pool, const Query& q, const RoutePath& path,
                      const CostWeights& weights, double tol) {
  const auto best = brute_force_best_path(graph, pool, q.intent, weights);
  const double mine = expected_path(graph, pool, path, q.intent, weights).utility;
  return mine >= best.utility - tol;
}

struct QueryTally {
  std::size_t optimal = 0;
  double quality = 0.0;
  double cost = 0.0;
};

StressLevel finish_level(std::size_t workers, double wall, const QueryTally& tally, std::size_t n,
                         std::uint64_t violations) {
  StressLevel lvl;
  lvl.workers = workers;
  lvl.wall_time = wall;
  lvl.queries = n;
  const auto dn = static_cast<double>(n);
  lvl.accuracy = static_cast<double>(tally.optimal) / dn;
  lvl.mean_quality = tally.quality / dn;
  lvl.mean_cost = tally.cost / dn;
  lvl.conservation_violations = violations;
  return lvl;
}

}  // namespace

PolicyFactory amro_policy(AmroPolicyConfig config) {
  auto shared = std::make_shared<const AmroPolicyConfig>(std::move(config));
  return [shared](LayeredGraph& graph) -> std::unique_ptr<RoutePolicy> {
    return std::make_unique<AmroPolicy>(graph, *shared);
  };
}

PolicyFactory wrr_policy() {
  return [](LayeredGraph& graph) -> std::unique_ptr<RoutePolicy> { return std::make_unique<WrrPolicy>(graph); };
}

PolicyFactory random_policy() {
  return [](LayeredGraph& graph) -> std::unique_ptr<RoutePolicy> { return std::make_unique<RandomPolicy>(graph); };
}

StressLevel run_level_des(const LayeredGraph& graph_template, const AgentPool& pool_template,
                          std::span<const Query> queries, const CostWeights& weights, const PolicyFactory& factory,
                          std::size_t workers, const StressOptions& options) {
  if (workers == 0) fail(ErrorKind::Config, "concurrency level must be positive");
  if (queries.empty()) fail(ErrorKind::Data, "stress workload is empty");

  LayeredGraph graph = graph_template;
  AgentPool pool = pool_template;
  auto policy = factory(graph);

  struct Worker {
    std::size_t query = 0;
    RoutePath path;
    std::size_t stage = 0;
    double started = 0.0;
    RouteTrace trace;
    double quality = 0.0;
    Rng rng{0};
  };
  struct Event {
    double time;
    std::uint64_t seq;
    std::size_t worker;
    bool operator>(const Event& o) const { return time != o.time ? time > o.time : seq > o.seq; }
  };

  std::vector<Worker> ws(workers);
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  std::uint64_t seq = 0;
  std::size_t next_query = 0;
  std::uint64_t violations = 0;
  QueryTally tally;
  double clock = 0.0;

  auto check_conservation = [&](NodeId id) {
    const double expected = static_cast<double>(pool.in_flight(id)) / pool.agent(id).capacity;
    if (graph.telemetry(id).load != expected) ++violations;
  };

  auto start_stage = [&](std::size_t w, double now) {
    auto& wk = ws[w];
    const NodeId id = wk.path.node(wk.stage);
    const double load = pool.dispatch(id, graph);
    policy->on_telemetry(id);
    check_conservation(id);
    const auto& q = queries[wk.query];
    const auto r = simulate_execute(pool.agent(id), q.intent, load, pool.theta_soft(), wk.rng);
    wk.trace.stages.push_back({id, r.tokens_in, r.tokens_out, r.latency, load});
    wk.quality += r.quality;
    events.push({now + r.latency, seq++, w});
  };

  auto begin_query = [&](std::size_t w, double now) {
    if (next_query >= queries.size()) return;
    auto& wk = ws[w];
    wk.query = next_query++;
    wk.rng = query_rng(options.seed, wk.query);
    const auto& q = queries[wk.query];
    wk.path = policy->route(q, wk.rng);
    graph.validate(wk.path);
    if (routed_optimally(graph, pool, q, wk.path, weights, options.optimality_tolerance)) ++tally.optimal;
    wk.stage = 0;
    wk.started = now;
    wk.trace = {};
    wk.quality = 0.0;
    start_stage(w, now);
  };

  for (std::size_t w = 0; w < workers; ++w) begin_query(w, 0.0);

  while (!events.empty()) {
    const Event ev = events.top();
    events.pop();
    clock = ev.time;
    auto& wk = ws[ev.worker];
    const NodeId id = wk.path.node(wk.stage);
    pool.complete(id, graph, wk.trace.stages.back().latency);
    policy->on_telemetry(id);
    check_conservation(id);

    if (++wk.stage < wk.path.size()) {
      start_stage(ev.worker, clock);
      continue;
    }
    wk.trace.wall_time = clock - wk.started;
    const auto& q = queries[wk.query];
    const double quality = wk.quality / static_cast<double>(wk.path.size());
    tally.quality += quality;
    tally.cost += path_cost(wk.trace, weights).weighted_total;
    policy->on_served({q.text, q.intent, wk.path, {}, wk.trace, quality}, wk.rng);
    begin_query(ev.worker, clock);
  }

  for (std::size_t l = 0; l < graph.num_layers(); ++l) {
    for (std::size_t j = 0; j < graph.width(); ++j) {
      if (pool.in_flight({l, j}) != 0) ++violations;
    }
  }
  return finish_level(workers, clock, tally, queries.size(), violations);
}

StressLevel run_level_threaded(const LayeredGraph& graph_template, const AgentPool& pool_template,
                               std::span<const Query> queries, const CostWeights& weights,
                               const PolicyFactory& factory, std::size_t workers, double time_scale,
                               const StressOptions& options) {
  if (workers == 0) fail(ErrorKind::Config, "concurrency level must be positive");
  if (queries.empty()) fail(ErrorKind::Data, "stress workload is empty");
  if (!(time_scale >= 0.0)) fail(ErrorKind::Config, "time scale must be >= 0");

  LayeredGraph graph = graph_template;
  AgentPool pool = pool_template;
  auto policy = factory(graph);

  std::atomic<std::size_t> next{0};
  std::atomic<std::uint64_t> violations{0};
  std::mutex tally_mu;
  QueryTally tally;

  auto work = [&] {
    for (;;) {
      const std::size_t qi = next.fetch_add(1);
      if (qi >= queries.size()) return;
      const auto& q = queries[qi];
      Rng rng = query_rng(options.seed, qi);
      const RoutePath path = policy->route(q, rng);
      const bool optimal = routed_optimally(graph, pool, q, path, weights, options.optimality_tolerance);

      RouteTrace trace;
      double quality = 0.0;
      const auto started = std::chrono::steady_clock::now();
      for (std::size_t s = 0; s < path.size(); ++s) {
        const NodeId id = path.node(s);
        const double load = pool.dispatch(id, graph);
        policy->on_telemetry(id);
        if (pool.in_flight(id) < 1) violations.fetch_add(1);
        const auto r = simulate_execute(pool.agent(id), q.intent, load, pool.theta_soft(), rng);
        if (time_scale > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(r.latency * time_scale));
        pool.complete(id, graph, r.latency);
        policy->on_telemetry(id);
        trace.stages.push_back({id, r.tokens_in, r.tokens_out, r.latency, load});
        quality += r.quality;
      }
      trace.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() /
                        (time_scale > 0.0 ? time_scale : 1.0);
      quality /= static_cast<double>(path.size());
      {
        std::lock_guard lock(tally_mu);
        tally.optimal += optimal ? 1 : 0;
        tally.quality += quality;
        tally.cost += path_cost(trace, weights).weighted_total;
      }
      policy->on_served({q.text, q.intent, path, {}, trace, quality}, rng);
    }
  };

  const auto t0 = std::chrono::steady_clock::now();
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::uint64_t v = violations.load();
  if (pool.total_dispatched() != pool.total_completed()) ++v;
  for (std::size_t l = 0; l < graph.num_layers(); ++l) {
    for (std::size_t j = 0; j < graph.width(); ++j) {
      const NodeId id{l, j};
      if (pool.in_flight(id) != 0 || graph.telemetry(id).load != 0.0) ++v;
    }
  }
  return finish_level(workers, wall, tally, queries.size(), v);
}

SystemStress run_system(const std::string& name, const LayeredGraph& graph, const AgentPool& pool,
                        std::span<const Query> queries, const CostWeights& weights, const PolicyFactory& factory,
                        const StressOptions& options) {
  if (options.levels.empty()) fail(ErrorKind::Config, "stress run needs at least one concurrency level");
  if (!std::is_sorted(options.levels.begin(), options.levels.end())) {
    fail(ErrorKind::Config, "concurrency levels must be sorted ascending");
  }
  SystemStress out{name, {}};
  for (std::size_t workers : options.levels) {
    out.levels.push_back(run_level_des(graph, pool, queries, weights, factory, workers, options));
  }
  const double base = out.levels.front().wall_time;
  for (auto& lvl : out.levels) lvl.speedup = lvl.wall_time > 0.0 ? base / lvl.wall_time : 1.0;
  out.levels.front().speedup = 1.0;
  return out;
}

StressReport stress_run(const LayeredGraph& graph, const AgentPool& pool, std::span<const Query> queries,
                        const CostWeights& weights, const PolicyFactory& system, const PolicyFactory& baseline,
                        const StressOptions& options, const std::string& system_name,
                        const std::string& baseline_name) {
  StressReport report;
  report.systems.push_back(run_system(system_name, graph, pool, queries, weights, system, options));
  report.systems.push_back(run_system(baseline_name, graph, pool, queries, weights, baseline, options));
  return report;
}

}  // namespace amro
