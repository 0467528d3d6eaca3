#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "amro/graph.hpp"
#include "amro/task.hpp"

namespace amro {

/// Lower bound applied after every pheromone update.
inline constexpr double kTauMin = 1e-6;

/// Edge values over a layered graph: one row from a virtual source into
/// layer 0, then an n x n block per adjacent layer pair.
class PheromoneMatrix {
 public:
  PheromoneMatrix() = default;
  PheromoneMatrix(std::size_t num_layers, std::size_t width, double initial);

  std::size_t num_layers() const noexcept { return layers_; }
  std::size_t width() const noexcept { return width_; }
  bool same_shape(const PheromoneMatrix& o) const noexcept { return layers_ == o.layers_ && width_ == o.width_; }
  bool matches(const LayeredGraph& g) const noexcept { return layers_ == g.num_layers() && width_ == g.width(); }

  /// Row of edges leaving (layer, from) into layer + 1.
  std::span<double> row(std::size_t layer, std::size_t from);
  std::span<const double> row(std::size_t layer, std::size_t from) const;
  std::span<double> source_row() { return {values_.data(), width_}; }
  std::span<const double> source_row() const { return {values_.data(), width_}; }

  double& edge(std::size_t layer, std::size_t from, std::size_t to) { return row(layer, from)[to]; }
  double edge(std::size_t layer, std::size_t from, std::size_t to) const { return row(layer, from)[to]; }

  /// Outgoing row used when choosing the node of `layer` on `path`:
  /// the source row for layer 0, otherwise the predecessor's row.
  std::span<const double> incoming_row(std::size_t layer, std::span<const std::size_t> prefix) const;

  /// Visits every edge of a path: the source edge then each stage transition.
  template <typename F>
  void for_each_path_edge(const RoutePath& path, F&& f) {
    f(values_[path.slots.at(0)]);
    for (std::size_t l = 0; l + 1 < path.slots.size(); ++l) f(edge(l, path.slots[l], path.slots[l + 1]));
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  void apply_floor(double floor = kTauMin);

  friend bool operator==(const PheromoneMatrix&, const PheromoneMatrix&) = default;

 private:
  std::size_t offset(std::size_t layer, std::size_t from) const;

  std::size_t layers_ = 0;
  std::size_t width_ = 0;
  std::vector<double> values_;
};

struct PheromoneSpecialist {
  std::string task;
  PheromoneMatrix tau;

  friend bool operator==(const PheromoneSpecialist&, const PheromoneSpecialist&) = default;
};

/// One specialist per task, in TaskSet order. `sequence` counts published
/// online batches.
struct SpecialistSet {
  TaskSet tasks;
  std::vector<PheromoneSpecialist> specialists;
  std::uint64_t sequence = 0;

  static SpecialistSet uniform(const LayeredGraph& graph, double initial = 1.0);

  /// Throws Error(State) when shapes or tasks disagree with the graph.
  void check_compatible(const LayeredGraph& graph) const;

  friend bool operator==(const SpecialistSet&, const SpecialistSet&) = default;
};

using FusedPheromone = PheromoneMatrix;

/// Entrywise sum_t w_t * tau^t.
FusedPheromone fuse_pheromone(std::span<const PheromoneSpecialist> specialists, const WeightVector& w);

/// Read-mostly holder of the current specialist set. Readers take an
/// immutable snapshot; writers publish whole replacements.
class SnapshotStore {
 public:
  explicit SnapshotStore(SpecialistSet initial)
      : current_(std::make_shared<const SpecialistSet>(std::move(initial))) {}

  std::shared_ptr<const SpecialistSet> load() const {
    std::lock_guard lock(mu_);
    return current_;
  }

  void publish(SpecialistSet next) {
    auto p = std::make_shared<const SpecialistSet>(std::move(next));
    std::lock_guard lock(mu_);
    current_ = std::move(p);
  }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const SpecialistSet> current_;
};

}  // namespace amro
