#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "amro/graph.hpp"

namespace amro {

enum class LoadStat { Max, Mean };

struct CostWeights {
  double omega_tok = 0.0;
  double omega_lat = 0.0;
  double omega_load = 0.0;
  double lambda = 1.0;
  LoadStat load_stat = LoadStat::Max;

  void validate() const;
};

struct StageRecord {
  NodeId node;
  std::uint64_t tokens_in = 0;
  std::uint64_t tokens_out = 0;
  double latency = 0.0;  // seconds
  double load_at_dispatch = 0.0;
};

/// Per-stage execution telemetry of one routed query.
struct RouteTrace {
  std::vector<StageRecord> stages;
  double wall_time = 0.0;  // end-to-end seconds
};

struct CostBreakdown {
  double tokens = 0.0;
  double latency = 0.0;
  double load_agg = 0.0;
  double weighted_total = 0.0;
};

/// Decomposed path cost. Throws Error(Data) on an empty trace and, when
/// `expected_stages` is nonzero, on a trace with a missing stage.
CostBreakdown path_cost(const RouteTrace& trace, const CostWeights& weights, std::size_t expected_stages = 0);

/// U = R - lambda * C.
inline double utility(double quality, const CostBreakdown& cost, double lambda) {
  return quality - lambda * cost.weighted_total;
}

/// Display-only dollar conversion keyed by node backbone (USD per 1k tokens).
class PriceTable {
 public:
  PriceTable() = default;
  explicit PriceTable(std::map<std::string, double> usd_per_1k) : usd_per_1k_(std::move(usd_per_1k)) {}

  bool empty() const noexcept { return usd_per_1k_.empty(); }
  double usd(const RouteTrace& trace, const LayeredGraph& graph) const;

 private:
  std::map<std::string, double> usd_per_1k_;
};

}  // namespace amro
