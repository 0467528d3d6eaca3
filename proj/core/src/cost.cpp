#include "amro/cost.hpp"

#include <algorithm>
#include <cmath>

#include "amro/error.hpp"

namespace amro {

void CostWeights::validate() const {
  if (!(omega_tok >= 0.0 && omega_lat >= 0.0 && omega_load >= 0.0)) {
    fail(ErrorKind::Config, "cost weights must be >= 0");
  }
  if (!(lambda >= 0.0 && std::isfinite(lambda))) fail(ErrorKind::Config, "lambda must be finite and >= 0");
}

CostBreakdown path_cost(const RouteTrace& trace, const CostWeights& weights, std::size_t expected_stages) {
  if (trace.stages.empty()) fail(ErrorKind::Data, "incomplete trace: no stage records");
  if (expected_stages != 0 && trace.stages.size() != expected_stages) {
    fail(ErrorKind::Data, "incomplete trace: missing stage record");
  }
  CostBreakdown c;
  double load_sum = 0.0;
  double load_max = 0.0;
  std::uint64_t tokens = 0;
  for (const auto& s : trace.stages) {
    if (s.latency < 0.0 || s.load_at_dispatch < 0.0) fail(ErrorKind::Data, "trace values must be >= 0");
    tokens += s.tokens_in + s.tokens_out;
    load_sum += s.load_at_dispatch;
    load_max = std::max(load_max, s.load_at_dispatch);
  }
  c.tokens = static_cast<double>(tokens);
  c.latency = trace.wall_time;
  c.load_agg = weights.load_stat == LoadStat::Max ? load_max : load_sum / static_cast<double>(trace.stages.size());
  c.weighted_total = weights.omega_tok * c.tokens + weights.omega_lat * c.latency + weights.omega_load * c.load_agg;
  return c;
}

double PriceTable::usd(const RouteTrace& trace, const LayeredGraph& graph) const {
  double total = 0.0;
  for (const auto& s : trace.stages) {
    auto it = usd_per_1k_.find(graph.profile(s.node).backbone);
    if (it == usd_per_1k_.end()) continue;
    total += it->second * static_cast<double>(s.tokens_in + s.tokens_out) / 1000.0;
  }
  return total;
}

}  // namespace amro
