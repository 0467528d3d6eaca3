#include "amro/engine.hpp"

#include "amro/error.hpp"

namespace amro {

AmroEngine::AmroEngine(LayeredGraph& graph, std::shared_ptr<const IntentRouter> router, SpecialistSet initial,
                       SamplerParams params)
    : graph_(graph), router_(std::move(router)), store_(std::move(initial)), params_(params) {
  if (!router_) fail(ErrorKind::Config, "engine needs an intent router");
  if (!(router_->tasks() == graph.tasks())) fail(ErrorKind::Config, "router task set does not match the graph");
  params_.validate();
  store_.load()->check_compatible(graph);
  norm_.seed_from(graph, params_.epsilon);
}

RouteDecision AmroEngine::route(std::string_view query, Rng& rng) const {
  RouteDecision d;
  auto out = router_->infer(query);
  d.w = std::move(out.weights);
  d.low_confidence = out.low_confidence;
  const auto snapshot = store_.load();
  d.snapshot_sequence = snapshot->sequence;
  d.path = PathSampler(graph_, *snapshot, d.w, params_, norm_.bounds()).sample(rng, &d.stats);
  return d;
}

void AmroEngine::observe(NodeId id, const TelemetryObservation& obs) {
  graph_.update_telemetry(id, obs);
  record_signals(id);
}

void AmroEngine::record_signals(NodeId id) {
  const auto t = graph_.telemetry(id);
  norm_.push(Signal::InverseLoad, 1.0 / (t.load + params_.epsilon));
  norm_.push(Signal::InverseResponse, 1.0 / (t.response_time + params_.epsilon));
}

ServeSummary serve_sequential(AmroEngine& engine, const AgentPool& pool, std::span<const Query> queries,
                              const CostWeights& weights, OnlineEvolver* evolver, std::uint64_t seed) {
  ServeSummary summary;
  summary.served.reserve(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    Rng rng(Rng::mix(seed ^ Rng::mix(i + 1)));
    const auto& q = queries[i];
    ServedQuery s;
    s.index = i;
    s.query = q.text;
    s.decision = engine.route(q.text, rng);

    std::vector<double> loads;
    for (std::size_t l = 0; l < s.decision.path.size(); ++l) {
      loads.push_back(engine.graph().telemetry(s.decision.path.node(l)).load);
    }
    const auto ex = execute_path(pool, s.decision.path, q.intent, rng, loads);
    for (const auto& st : ex.trace.stages) engine.observe(st.node, {.response_time = st.latency});

    s.quality = ex.quality;
    s.cost = path_cost(ex.trace, weights);
    s.utility = utility(s.quality, s.cost, weights.lambda);
    summary.mean_quality += s.quality;
    summary.mean_cost += s.cost.weighted_total;
    summary.mean_utility += s.utility;

    if (evolver) {
      ServingRecord rec{q.text, s.decision.w, s.decision.path, {}, ex.trace, ex.quality};
      evolver->observe(std::move(rec), rng);
    }
    summary.served.push_back(std::move(s));
  }
  if (!queries.empty()) {
    const auto n = static_cast<double>(queries.size());
    summary.mean_quality /= n;
    summary.mean_cost /= n;
    summary.mean_utility /= n;
  }
  return summary;
}

}  // namespace amro
