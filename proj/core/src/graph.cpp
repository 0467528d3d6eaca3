#include "amro/graph.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

#include "amro/error.hpp"
#include "amro/rng.hpp"

namespace amro {

struct LayeredGraph::TelemetryCell {
  mutable std::mutex mu;
  NodeTelemetry value;
  std::deque<double> rt_window;
};

std::string to_string(const RoutePath& path) {
  std::ostringstream os;
  for (std::size_t i = 0; i < path.slots.size(); ++i) {
    if (i) os << '-';
    os << path.slots[i];
  }
  return os.str();
}

GraphConfig GraphConfig::generate(std::size_t num_layers, std::size_t nodes_per_layer, TaskSet tasks,
                                  std::uint64_t seed) {
  GraphConfig cfg;
  cfg.num_layers = num_layers;
  cfg.nodes_per_layer = nodes_per_layer;
  Rng rng(seed);
  for (std::size_t l = 0; l < num_layers; ++l) {
    for (std::size_t j = 0; j < nodes_per_layer; ++j) {
      NodeProfile p;
      p.id = {l, j};
      p.backbone = "backbone-" + std::to_string(j);
      p.policy = "policy-" + std::to_string(l);
      for (std::size_t t = 0; t < tasks.size(); ++t) p.ability.push_back(rng.uniform());
      cfg.nodes.push_back(std::move(p));
    }
  }
  cfg.tasks = std::move(tasks);
  return cfg;
}

LayeredGraph::~LayeredGraph() = default;
LayeredGraph::LayeredGraph(LayeredGraph&&) noexcept = default;
LayeredGraph& LayeredGraph::operator=(LayeredGraph&&) noexcept = default;

LayeredGraph::LayeredGraph(const LayeredGraph& other)
    : layers_(other.layers_),
      width_(other.width_),
      tasks_(other.tasks_),
      theta_load_(other.theta_load_),
      response_window_(other.response_window_),
      profiles_(other.profiles_) {
  cells_.reserve(other.cells_.size());
  for (const auto& c : other.cells_) {
    auto copy = std::make_unique<TelemetryCell>();
    std::lock_guard lock(c->mu);
    copy->value = c->value;
    copy->rt_window = c->rt_window;
    cells_.push_back(std::move(copy));
  }
}

LayeredGraph& LayeredGraph::operator=(const LayeredGraph& other) {
  if (this != &other) {
    LayeredGraph tmp(other);
    *this = std::move(tmp);
  }
  return *this;
}

std::size_t LayeredGraph::num_paths() const {
  std::size_t total = 1;
  for (std::size_t l = 0; l < layers_; ++l) {
    if (total > std::numeric_limits<std::size_t>::max() / width_) return std::numeric_limits<std::size_t>::max();
    total *= width_;
  }
  return total;
}

const NodeProfile& LayeredGraph::profile(NodeId id) const {
  if (!contains(id)) fail(ErrorKind::Config, "node id out of range");
  return profiles_[flat(id)];
}

NodeTelemetry LayeredGraph::telemetry(NodeId id) const {
  if (!contains(id)) fail(ErrorKind::Config, "node id out of range");
  const auto& cell = *cells_[flat(id)];
  std::lock_guard lock(cell.mu);
  return cell.value;
}

void LayeredGraph::update_telemetry(NodeId id, const TelemetryObservation& obs) {
  if (!contains(id)) fail(ErrorKind::Config, "node id out of range");
  if (obs.load && !(*obs.load >= 0.0 && std::isfinite(*obs.load))) {
    fail(ErrorKind::Config, "load must be finite and >= 0");
  }
  if (obs.response_time && !(*obs.response_time >= 0.0 && std::isfinite(*obs.response_time))) {
    fail(ErrorKind::Config, "response time must be finite and >= 0");
  }
  auto& cell = *cells_[flat(id)];
  std::lock_guard lock(cell.mu);
  if (obs.available) cell.value.available = *obs.available;
  if (obs.load) cell.value.load = *obs.load;
  if (obs.response_time) {
    cell.rt_window.push_back(*obs.response_time);
    if (cell.rt_window.size() > response_window_) cell.rt_window.pop_front();
    cell.value.response_time =
        std::accumulate(cell.rt_window.begin(), cell.rt_window.end(), 0.0) / static_cast<double>(cell.rt_window.size());
  }
}

void LayeredGraph::validate(const RoutePath& path) const {
  if (path.slots.size() != layers_) fail(ErrorKind::Config, "route must visit exactly one node per layer");
  for (std::size_t s : path.slots) {
    if (s >= width_) fail(ErrorKind::Config, "route slot out of range");
  }
}

LayeredGraph build_graph(const GraphConfig& config) {
  if (config.num_layers < 2) fail(ErrorKind::Config, "at least two layers required");
  if (config.nodes_per_layer < 1) fail(ErrorKind::Config, "at least one node per layer required");
  if (config.tasks.empty()) fail(ErrorKind::Config, "task set must not be empty");
  if (!(config.theta_load >= 0.0)) fail(ErrorKind::Config, "theta_load must be >= 0");
  if (config.response_window == 0) fail(ErrorKind::Config, "response window must be positive");

  const std::size_t total = config.num_layers * config.nodes_per_layer;
  if (config.nodes.size() != total) {
    fail(ErrorKind::Config, "dimension mismatch: expected " + std::to_string(total) + " node profiles, got " +
                                std::to_string(config.nodes.size()));
  }

  LayeredGraph g;
  g.layers_ = config.num_layers;
  g.width_ = config.nodes_per_layer;
  g.tasks_ = config.tasks;
  g.theta_load_ = config.theta_load;
  g.response_window_ = config.response_window;
  g.profiles_.resize(total);
  std::vector<bool> seen(total, false);

  for (const auto& p : config.nodes) {
    if (!g.contains(p.id)) fail(ErrorKind::Config, "dimension mismatch: node id out of range");
    const std::size_t f = g.flat(p.id);
    if (seen[f]) {
      fail(ErrorKind::Config,
           "duplicate node id (" + std::to_string(p.id.layer) + "," + std::to_string(p.id.slot) + ")");
    }
    seen[f] = true;
    if (p.ability.size() != config.tasks.size()) fail(ErrorKind::Config, "incomplete ability map");
    for (double a : p.ability) {
      if (!(a >= 0.0 && a <= 1.0)) fail(ErrorKind::Config, "ability scores must lie in [0,1]");
    }
    g.profiles_[f] = p;
  }

  g.cells_.reserve(total);
  for (std::size_t i = 0; i < total; ++i) g.cells_.push_back(std::make_unique<LayeredGraph::TelemetryCell>());
  return g;
}

std::vector<std::size_t> allowed_in_layer(const LayeredGraph& graph, std::size_t layer, double theta_load) {
  if (layer >= graph.num_layers()) fail(ErrorKind::Config, "layer out of range");
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < graph.width(); ++j) {
    const auto t = graph.telemetry({layer, j});
    if (t.available && t.load <= theta_load) out.push_back(j);
  }
  return out;
}

std::vector<std::size_t> allowed(const LayeredGraph& graph, NodeId from, double theta_load) {
  if (!graph.contains(from)) fail(ErrorKind::Config, "node id out of range");
  if (from.layer + 1 >= graph.num_layers()) fail(ErrorKind::Config, "no successor layer");
  return allowed_in_layer(graph, from.layer + 1, theta_load);
}

}  // namespace amro
