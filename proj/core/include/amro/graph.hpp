#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "amro/task.hpp"

namespace amro {

/// Zero-based (layer, slot) coordinate of an agent node.
struct NodeId {
  std::size_t layer = 0;
  std::size_t slot = 0;

  friend bool operator==(const NodeId&, const NodeId&) = default;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct NodeProfile {
  NodeId id;
  std::string backbone;
  std::string policy;
  /// Capability prior per task, indexed like the graph's TaskSet.
  std::vector<double> ability;
};

struct NodeTelemetry {
  bool available = true;
  double load = 0.0;           // utilization fraction, 1.0 = nominal capacity
  double response_time = 0.0;  // seconds, windowed mean
};

/// Partial update; unset fields keep their value.
struct TelemetryObservation {
  std::optional<double> load{};
  std::optional<double> response_time{};
  std::optional<bool> available{};
};

/// One node per layer, in layer order.
struct RoutePath {
  std::vector<std::size_t> slots;

  std::size_t size() const noexcept { return slots.size(); }
  NodeId node(std::size_t layer) const { return {layer, slots.at(layer)}; }

  friend bool operator==(const RoutePath&, const RoutePath&) = default;
  friend auto operator<=>(const RoutePath&, const RoutePath&) = default;
};

std::string to_string(const RoutePath& path);

struct GraphConfig {
  std::size_t num_layers = 0;
  std::size_t nodes_per_layer = 0;
  TaskSet tasks;
  std::vector<NodeProfile> nodes;
  double theta_load = 0.8;
  std::size_t response_window = 50;

  /// Random abilities in [0,1], labelled backbone-/policy- placeholders.
  static GraphConfig generate(std::size_t num_layers, std::size_t nodes_per_layer, TaskSet tasks,
                              std::uint64_t seed);
};

/// N layers of n agent nodes with complete bipartite edges between adjacent
/// layers. Topology and profiles are immutable; telemetry is updated
/// concurrently and read as a consistent per-node unit.
class LayeredGraph {
 public:
  LayeredGraph(const LayeredGraph& other);
  LayeredGraph& operator=(const LayeredGraph& other);
  LayeredGraph(LayeredGraph&&) noexcept;
  LayeredGraph& operator=(LayeredGraph&&) noexcept;
  ~LayeredGraph();

  std::size_t num_layers() const noexcept { return layers_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t num_nodes() const noexcept { return layers_ * width_; }
  std::size_t num_edges() const noexcept { return (layers_ - 1) * width_ * width_; }
  std::size_t num_paths() const;  // saturates at SIZE_MAX
  const TaskSet& tasks() const noexcept { return tasks_; }
  double theta_load() const noexcept { return theta_load_; }

  std::size_t flat(NodeId id) const { return id.layer * width_ + id.slot; }
  bool contains(NodeId id) const noexcept { return id.layer < layers_ && id.slot < width_; }

  const NodeProfile& profile(NodeId id) const;
  NodeTelemetry telemetry(NodeId id) const;

  /// Overwrites the supplied fields; response_time observations feed a
  /// sliding-window mean. Rejects negative load or response time.
  void update_telemetry(NodeId id, const TelemetryObservation& obs);

  /// Throws Error(Config) if the path is not one valid node per layer.
  void validate(const RoutePath& path) const;

 private:
  struct TelemetryCell;
  friend LayeredGraph build_graph(const GraphConfig& config);
  LayeredGraph() = default;

  std::size_t layers_ = 0;
  std::size_t width_ = 0;
  TaskSet tasks_;
  double theta_load_ = 0.8;
  std::size_t response_window_ = 50;
  std::vector<NodeProfile> profiles_;
  std::vector<std::unique_ptr<TelemetryCell>> cells_;
};

LayeredGraph build_graph(const GraphConfig& config);

/// Slots in layer `layer` that are available with load <= theta_load.
std::vector<std::size_t> allowed_in_layer(const LayeredGraph& graph, std::size_t layer, double theta_load);

/// Feasible successors of `from` (slot indices in the next layer).
std::vector<std::size_t> allowed(const LayeredGraph& graph, NodeId from, double theta_load);

}  // namespace amro
