#include "amro/sim.hpp"

#include <algorithm>
#include <cmath>

#include "amro/error.hpp"

namespace amro {

void AgentModel::validate(std::size_t num_tasks) const {
  if (base_quality.size() != num_tasks) fail(ErrorKind::Config, "agent base quality must cover every task");
  for (double q : base_quality) {
    if (!(q >= 0.0 && q <= 1.0)) fail(ErrorKind::Config, "agent base quality must lie in [0,1]");
  }
  if (!(latency.mean >= 0.0 && latency.jitter >= 0.0 && tokens.mean >= 0.0 && tokens.jitter >= 0.0)) {
    fail(ErrorKind::Config, "agent latency and token distributions must be >= 0");
  }
  if (!(input_tokens >= 0.0 && load_sensitivity >= 0.0 && quality_jitter >= 0.0)) {
    fail(ErrorKind::Config, "agent parameters must be >= 0");
  }
  if (!(capacity > 0.0)) fail(ErrorKind::Config, "agent capacity must be > 0");
}

double quality_mean(const AgentModel& agent, const WeightVector& w, double load, double theta_soft) {
  double q = 0.0;
  for (std::size_t t = 0; t < w.size(); ++t) q += w[t] * agent.base_quality[t];
  return q - agent.load_sensitivity * std::max(0.0, load - theta_soft);
}

ExecResult simulate_execute(const AgentModel& agent, const WeightVector& w, double current_load, double theta_soft,
                            Rng& rng) {
  if (w.size() != agent.base_quality.size()) fail(ErrorKind::Config, "query mix does not match agent tasks");
  const double uq = rng.uniform();
  const double ut = rng.uniform();
  const double ul = rng.uniform();

  ExecResult r;
  const double q = quality_mean(agent, w, current_load, theta_soft) + agent.quality_jitter * (2.0 * uq - 1.0);
  r.quality = std::clamp(q, 0.0, 1.0);
  r.tokens_in = static_cast<std::uint64_t>(std::llround(agent.input_tokens));
  r.tokens_out = static_cast<std::uint64_t>(std::llround(std::max(0.0, agent.tokens.mean + agent.tokens.jitter * (2.0 * ut - 1.0))));
  r.latency = std::max(0.0, agent.latency.mean + agent.latency.jitter * (2.0 * ul - 1.0)) * latency_scale(current_load);
  return r;
}

AgentPool::AgentPool(const LayeredGraph& graph, std::vector<AgentModel> agents, double theta_soft)
    : layers_(graph.num_layers()), width_(graph.width()), theta_soft_(theta_soft) {
  if (!(theta_soft >= 0.0)) fail(ErrorKind::Config, "theta_soft must be >= 0");
  if (agents.size() != graph.num_nodes()) fail(ErrorKind::Config, "agent models must cover every node");
  agents_.resize(graph.num_nodes());
  std::vector<bool> seen(graph.num_nodes(), false);
  for (auto& a : agents) {
    if (!graph.contains(a.node)) fail(ErrorKind::Config, "agent model node out of range");
    a.validate(graph.tasks().size());
    const auto f = graph.flat(a.node);
    if (seen[f]) fail(ErrorKind::Config, "duplicate agent model for a node");
    seen[f] = true;
    agents_[f] = std::move(a);
  }
  for (std::size_t i = 0; i < agents_.size(); ++i) cells_.push_back(std::make_unique<Cell>());
}

AgentPool::AgentPool(const AgentPool& other)
    : layers_(other.layers_), width_(other.width_), theta_soft_(other.theta_soft_), agents_(other.agents_) {
  for (const auto& c : other.cells_) {
    auto copy = std::make_unique<Cell>();
    std::lock_guard lock(c->mu);
    copy->in_flight = c->in_flight;
    copy->dispatched = c->dispatched;
    copy->completed = c->completed;
    cells_.push_back(std::move(copy));
  }
}

double AgentPool::dispatch(NodeId id, LayeredGraph& graph) {
  auto& c = *cells_.at(flat(id));
  std::lock_guard lock(c.mu);
  ++c.in_flight;
  ++c.dispatched;
  const double load = static_cast<double>(c.in_flight) / agents_[flat(id)].capacity;
  graph.update_telemetry(id, {.load = load});
  return load;
}

double AgentPool::complete(NodeId id, LayeredGraph& graph, double observed_latency) {
  auto& c = *cells_.at(flat(id));
  std::lock_guard lock(c.mu);
  if (c.in_flight <= 0) fail(ErrorKind::Internal, "completion without a matching dispatch");
  --c.in_flight;
  ++c.completed;
  const double load = static_cast<double>(c.in_flight) / agents_[flat(id)].capacity;
  graph.update_telemetry(id, {.load = load, .response_time = observed_latency});
  return load;
}

double AgentPool::load(NodeId id) const {
  auto& c = *cells_.at(flat(id));
  std::lock_guard lock(c.mu);
  return static_cast<double>(c.in_flight) / agents_[flat(id)].capacity;
}

std::uint64_t AgentPool::total_dispatched() const {
  std::uint64_t n = 0;
  for (const auto& c : cells_) {
    std::lock_guard lock(c->mu);
    n += c->dispatched;
  }
  return n;
}

std::uint64_t AgentPool::total_completed() const {
  std::uint64_t n = 0;
  for (const auto& c : cells_) {
    std::lock_guard lock(c->mu);
    n += c->completed;
  }
  return n;
}

std::vector<AgentModel> default_agents(const LayeredGraph& graph) {
  std::vector<AgentModel> out;
  for (std::size_t l = 0; l < graph.num_layers(); ++l) {
    for (std::size_t j = 0; j < graph.width(); ++j) {
      AgentModel a;
      a.node = {l, j};
      a.base_quality = graph.profile(a.node).ability;
      out.push_back(std::move(a));
    }
  }
  return out;
}

PathExpectation expected_path(const LayeredGraph& graph, const AgentPool& pool, const RoutePath& path,
                              const WeightVector& w, const CostWeights& weights) {
  PathExpectation e;
  double tokens = 0.0;
  double latency = 0.0;
  double load_max = 0.0;
  double load_sum = 0.0;
  for (std::size_t l = 0; l < path.size(); ++l) {
    const NodeId id = path.node(l);
    const auto& a = pool.agent(id);
    const double load = graph.telemetry(id).load;
    e.quality += std::clamp(quality_mean(a, w, load, pool.theta_soft()), 0.0, 1.0);
    tokens += a.input_tokens + a.tokens.mean;
    latency += a.latency.mean * latency_scale(load);
    load_max = std::max(load_max, load);
    load_sum += load;
  }
  const auto n = static_cast<double>(path.size());
  e.quality /= n;
  e.cost.tokens = tokens;
  e.cost.latency = latency;
  e.cost.load_agg = weights.load_stat == LoadStat::Max ? load_max : load_sum / n;
  e.cost.weighted_total =
      weights.omega_tok * e.cost.tokens + weights.omega_lat * e.cost.latency + weights.omega_load * e.cost.load_agg;
  e.utility = utility(e.quality, e.cost, weights.lambda);
  return e;
}

BestPath brute_force_best_path(const LayeredGraph& graph, const AgentPool& pool, const WeightVector& w,
                               const CostWeights& weights) {
  if (graph.num_paths() > kMaxEnumeratedPaths) fail(ErrorKind::Config, "search space too large for enumeration");
  RoutePath path;
  path.slots.assign(graph.num_layers(), 0);
  BestPath best{path, -std::numeric_limits<double>::infinity()};
  for (;;) {
    const double u = expected_path(graph, pool, path, w, weights).utility;
    if (u > best.utility) best = {path, u};
    // Odometer increment, last layer fastest: lexicographic order.
    std::size_t l = graph.num_layers();
    while (l > 0) {
      --l;
      if (++path.slots[l] < graph.width()) break;
      path.slots[l] = 0;
      if (l == 0) return best;
    }
  }
}

Execution execute_path(const AgentPool& pool, const RoutePath& path, const WeightVector& intent, Rng& rng,
                       std::span<const double> loads) {
  Execution ex;
  for (std::size_t l = 0; l < path.size(); ++l) {
    const NodeId id = path.node(l);
    const double load = loads.empty() ? 0.0 : loads[l];
    const auto r = simulate_execute(pool.agent(id), intent, load, pool.theta_soft(), rng);
    ex.trace.stages.push_back({id, r.tokens_in, r.tokens_out, r.latency, load});
    ex.trace.wall_time += r.latency;
    ex.quality += r.quality;
  }
  ex.quality /= static_cast<double>(path.size());
  return ex;
}

SmoothWrr::SmoothWrr(std::size_t num_layers, std::vector<double> weights) : nominal_(std::move(weights)) {
  if (nominal_.empty()) fail(ErrorKind::Config, "round robin needs at least one node");
  for (double w : nominal_) {
    if (!(w > 0.0)) fail(ErrorKind::Config, "round robin weights must be positive");
    total_ += w;
  }
  current_.assign(num_layers, std::vector<double>(nominal_.size(), 0.0));
}

std::size_t SmoothWrr::next(std::size_t layer) {
  auto& cur = current_.at(layer);
  std::size_t best = 0;
  for (std::size_t j = 0; j < cur.size(); ++j) {
    cur[j] += nominal_[j];
    if (cur[j] > cur[best]) best = j;
  }
  cur[best] -= total_;
  return best;
}

std::size_t route_random(std::span<const std::size_t> allowed, Rng& rng) {
  if (allowed.empty()) fail(ErrorKind::Infeasible, "no feasible successor");
  return allowed[rng.index(allowed.size())];
}

Vocabulary Vocabulary::defaults(const TaskSet& tasks) {
  Vocabulary v;
  v.filler = {"please", "quickly", "for me", "in detail", "step by step", "thanks", "if possible", "briefly"};
  for (const auto& t : tasks.names()) {
    if (t == "math") {
      v.known.push_back({"solve", "equation", "prove", "integral", "derivative", "probability", "how many",
                         "calculate", "theorem", "sum of"});
      v.unknown.push_back({"arithmetic puzzle", "geometry riddle"});
    } else if (t == "code") {
      v.known.push_back({"python function", "implement", "bug", "compile", "algorithm", "unit test", "refactor",
                         "endpoint", "regex", "sort the list"});
      v.unknown.push_back({"shell script", "stack trace"});
    } else if (t == "general") {
      v.known.push_back({"history", "explain", "capital of", "summarize", "translate", "opinion", "recommend",
                         "describe", "who was", "meaning of"});
      v.unknown.push_back({"trivia question", "travel plan"});
    } else {
      std::vector<std::string> known;
      for (int i = 0; i < 6; ++i) known.push_back(t + " topic" + std::to_string(i));
      v.known.push_back(std::move(known));
      v.unknown.push_back({t + " oddity"});
    }
  }
  return v;
}

std::vector<Query> generate_workload(const WorkloadSpec& spec, const TaskSet& tasks, const Vocabulary& vocab) {
  const std::size_t k = tasks.size();
  if (spec.mix.size() != k) fail(ErrorKind::Config, "workload mix does not match the task set");
  if (spec.count == 0) fail(ErrorKind::Config, "workload count must be >= 1");
  if (vocab.known.size() != k || vocab.unknown.size() != k) fail(ErrorKind::Config, "vocabulary must cover every task");

  Rng rng(spec.seed);
  auto pick_task = [&] {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
      acc += spec.mix[t];
      if (u < acc) return t;
    }
    return spec.mix.argmax();
  };
  auto pick = [&](const std::vector<std::string>& list) -> const std::string& { return list[rng.index(list.size())]; };

  std::vector<Query> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    Query q;
    q.primary = pick_task();
    const bool unknown = rng.bernoulli(spec.unknown_fraction);
    const bool mixed = k > 1 && !unknown && rng.bernoulli(spec.mixed_fraction);
    std::string text = pick(vocab.filler);
    if (unknown) {
      text += " " + pick(vocab.unknown[q.primary]);
      q.intent = WeightVector::one_hot(k, q.primary);
    } else if (mixed) {
      std::size_t secondary = rng.index(k - 1);
      if (secondary >= q.primary) ++secondary;
      text += " " + pick(vocab.known[q.primary]) + " and " + pick(vocab.known[q.primary]) + " then " +
              pick(vocab.known[secondary]);
      std::vector<double> w(k, 0.0);
      w[q.primary] = 2.0 / 3.0;
      w[secondary] = 1.0 / 3.0;
      q.intent = WeightVector(std::move(w), true);
    } else {
      text += " " + pick(vocab.known[q.primary]);
      q.intent = WeightVector::one_hot(k, q.primary);
    }
    text += " #" + std::to_string(i);
    q.text = std::move(text);
    out.push_back(std::move(q));
  }
  return out;
}

SimulatedOutcomes simulated_outcomes(const LayeredGraph& graph, std::shared_ptr<const AgentPool> pool,
                                     const CostWeights& weights, Rng& rng, std::size_t calibration_paths) {
  const std::size_t k = graph.tasks().size();
  SimulatedOutcomes out;
  for (std::size_t t = 0; t < k; ++t) {
    const auto w = WeightVector::one_hot(k, t);
    double scale = 0.0;
    for (std::size_t i = 0; i < calibration_paths; ++i) {
      RoutePath p;
      for (std::size_t l = 0; l < graph.num_layers(); ++l) p.slots.push_back(rng.index(graph.width()));
      scale = std::max(scale, path_cost(execute_path(*pool, p, w, rng).trace, weights).weighted_total);
    }
    if (!(scale > 0.0)) scale = 1.0;
    out.cost_scale.push_back(scale);
    out.sources.push_back([pool, weights, w, scale](const RoutePath& path, Rng& r) {
      const auto ex = execute_path(*pool, path, w, r);
      return GradedOutcome{ex.quality, path_cost(ex.trace, weights).weighted_total / scale};
    });
  }
  return out;
}

}  // namespace amro
