#include "amro/heuristic.hpp"

#include <algorithm>
#include <cmath>

#include "amro/error.hpp"
#include "amro/sampler.hpp"

namespace amro {

double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) fail(ErrorKind::Data, "quantile of empty window");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

double map_to_unit(double lo, double hi, double value) {
  if (!(hi > lo)) return 0.5;
  const double clipped = std::clamp(value, lo, hi);
  return (clipped - lo) / (hi - lo);
}

}  // namespace

double robust_normalize(std::span<const double> window, double value, double q_low, double q_high) {
  if (window.empty()) fail(ErrorKind::Data, "empty normalization window");
  if (!(q_low >= 0.0 && q_low < q_high && q_high <= 1.0)) fail(ErrorKind::Config, "require 0 <= q_low < q_high <= 1");
  std::vector<double> sorted(window.begin(), window.end());
  std::sort(sorted.begin(), sorted.end());
  return map_to_unit(quantile(sorted, q_low), quantile(sorted, q_high), value);
}

double NormBounds::normalize(Signal s, double value) const {
  const auto i = static_cast<std::size_t>(s);
  return map_to_unit(lo[i], hi[i], value);
}

NormState::NormState(std::size_t capacity, double q_low, double q_high)
    : capacity_(capacity), q_low_(q_low), q_high_(q_high) {
  if (capacity == 0) fail(ErrorKind::Config, "normalization window capacity must be positive");
  if (!(q_low >= 0.0 && q_low < q_high && q_high <= 1.0)) fail(ErrorKind::Config, "require 0 <= q_low < q_high <= 1");
}

NormState::NormState(const NormState& other) {
  std::lock_guard lock(other.mu_);
  capacity_ = other.capacity_;
  q_low_ = other.q_low_;
  q_high_ = other.q_high_;
  rings_ = other.rings_;
}

NormState& NormState::operator=(const NormState& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  capacity_ = other.capacity_;
  q_low_ = other.q_low_;
  q_high_ = other.q_high_;
  rings_ = other.rings_;
  return *this;
}

void NormState::push(Signal s, double value) {
  std::lock_guard lock(mu_);
  auto& r = rings_[static_cast<std::size_t>(s)];
  if (r.data.size() < capacity_) {
    r.data.push_back(value);
  } else {
    r.data[r.next] = value;
    r.full = true;
  }
  r.next = (r.next + 1) % capacity_;
}

void NormState::seed_from(const LayeredGraph& graph, double epsilon) {
  for (std::size_t l = 0; l < graph.num_layers(); ++l) {
    for (std::size_t j = 0; j < graph.width(); ++j) {
      for (double a : graph.profile({l, j}).ability) push(Signal::Ability, a);
    }
  }
  for (std::size_t l = 0; l < graph.num_layers(); ++l) {
    for (std::size_t j = 0; j < graph.width(); ++j) {
      const auto t = graph.telemetry({l, j});
      push(Signal::InverseLoad, 1.0 / (t.load + epsilon));
      push(Signal::InverseResponse, 1.0 / (t.response_time + epsilon));
    }
  }
}

NormBounds NormState::bounds() const {
  NormBounds b;
  std::lock_guard lock(mu_);
  for (std::size_t s = 0; s < kSignalCount; ++s) {
    const auto& data = rings_[s].data;
    if (data.empty()) {
      b.lo[s] = b.hi[s] = 0.0;
      continue;
    }
    std::vector<double> sorted(data);
    std::sort(sorted.begin(), sorted.end());
    b.lo[s] = quantile(sorted, q_low_);
    b.hi[s] = quantile(sorted, q_high_);
  }
  return b;
}

std::vector<double> NormState::window(Signal s) const {
  std::lock_guard lock(mu_);
  return rings_[static_cast<std::size_t>(s)].data;
}

double node_heuristic(const NodeProfile& profile, const NodeTelemetry& telemetry, std::size_t task,
                      const SamplerParams& params, const NormBounds& bounds) {
  if (task >= profile.ability.size()) fail(ErrorKind::Config, "task missing from node ability map");
  double eta = 0.0;
  if (params.lambda_A != 0.0) eta += params.lambda_A * bounds.normalize(Signal::Ability, profile.ability[task]);
  if (params.lambda_L != 0.0) {
    eta += params.lambda_L * bounds.normalize(Signal::InverseLoad, 1.0 / (telemetry.load + params.epsilon));
  }
  if (params.lambda_R != 0.0) {
    eta += params.lambda_R *
           bounds.normalize(Signal::InverseResponse, 1.0 / (telemetry.response_time + params.epsilon));
  }
  return eta;
}

std::vector<double> fuse_heuristic(const std::vector<std::vector<double>>& per_task, const WeightVector& w) {
  if (per_task.size() != w.size()) fail(ErrorKind::Config, "task-set mismatch between heuristic and weights");
  if (per_task.empty()) return {};
  const std::size_t n = per_task.front().size();
  std::vector<double> fused(n, 0.0);
  for (std::size_t t = 0; t < per_task.size(); ++t) {
    if (per_task[t].size() != n) fail(ErrorKind::Config, "heuristic rows differ in length");
    if (w[t] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) fused[j] += w[t] * per_task[t][j];
  }
  return fused;
}

}  // namespace amro
