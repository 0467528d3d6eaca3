#pragma once

#include <array>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include "amro/graph.hpp"
#include "amro/task.hpp"

namespace amro {

struct SamplerParams;

/// Empirical quantile with linear interpolation between order statistics.
/// `sorted` must be ascending and nonempty.
double quantile(std::span<const double> sorted, double q);

/// Clips `value` to the [q_low, q_high] quantile band of `window` and maps
/// it onto [0,1]. A degenerate band yields 0.5.
double robust_normalize(std::span<const double> window, double value, double q_low, double q_high);

/// The three signals combined by the heuristic.
enum class Signal : std::size_t { Ability = 0, InverseLoad = 1, InverseResponse = 2 };
inline constexpr std::size_t kSignalCount = 3;

/// Quantile band per signal, taken from the windows at one instant.
struct NormBounds {
  std::array<double, kSignalCount> lo{};
  std::array<double, kSignalCount> hi{};

  double normalize(Signal s, double value) const;
};

/// Global per-signal ring buffers feeding robust normalization.
class NormState {
 public:
  static constexpr std::size_t kDefaultCapacity = 256;

  explicit NormState(std::size_t capacity = kDefaultCapacity, double q_low = 0.05, double q_high = 0.95);
  NormState(const NormState& other);
  NormState& operator=(const NormState& other);

  void push(Signal s, double value);

  /// Ability priors of every node plus the current load and response-time
  /// signals of every node.
  void seed_from(const LayeredGraph& graph, double epsilon);

  /// Snapshot of the clipping bands. Empty windows produce a 0.5 band.
  NormBounds bounds() const;

  std::vector<double> window(Signal s) const;
  double q_low() const noexcept { return q_low_; }
  double q_high() const noexcept { return q_high_; }

 private:
  struct Ring {
    std::vector<double> data;
    std::size_t next = 0;
    bool full = false;
  };

  mutable std::mutex mu_;
  std::size_t capacity_;
  double q_low_;
  double q_high_;
  std::array<Ring, kSignalCount> rings_;
};

/// Task-aware heuristic of one node:
///   lambda_A * norm(ability) + lambda_L * norm(1/(load+eps)) + lambda_R * norm(1/(rt+eps))
double node_heuristic(const NodeProfile& profile, const NodeTelemetry& telemetry, std::size_t task,
                      const SamplerParams& params, const NormBounds& bounds);

/// per_task[t][j] = eta_j(t); returns sum_t w_t * eta_j(t) for each node j.
std::vector<double> fuse_heuristic(const std::vector<std::vector<double>>& per_task, const WeightVector& w);

}  // namespace amro
