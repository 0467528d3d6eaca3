#include "amro/pheromone.hpp"

#include <algorithm>

#include "amro/error.hpp"

namespace amro {

PheromoneMatrix::PheromoneMatrix(std::size_t num_layers, std::size_t width, double initial)
    : layers_(num_layers), width_(width) {
  if (num_layers < 2 || width < 1) fail(ErrorKind::Config, "pheromone matrix needs >= 2 layers and >= 1 slot");
  if (!(initial > 0.0)) fail(ErrorKind::Config, "initial pheromone must be positive");
  values_.assign(width + (num_layers - 1) * width * width, initial);
}

std::size_t PheromoneMatrix::offset(std::size_t layer, std::size_t from) const {
  if (layer + 1 >= layers_ || from >= width_) fail(ErrorKind::Config, "pheromone row out of range");
  return width_ + (layer * width_ + from) * width_;
}

std::span<double> PheromoneMatrix::row(std::size_t layer, std::size_t from) {
  return {values_.data() + offset(layer, from), width_};
}

std::span<const double> PheromoneMatrix::row(std::size_t layer, std::size_t from) const {
  return {values_.data() + offset(layer, from), width_};
}

std::span<const double> PheromoneMatrix::incoming_row(std::size_t layer, std::span<const std::size_t> prefix) const {
  if (layer == 0) return source_row();
  return row(layer - 1, prefix[layer - 1]);
}

void PheromoneMatrix::apply_floor(double floor) {
  for (double& v : values_) v = std::max(v, floor);
}

SpecialistSet SpecialistSet::uniform(const LayeredGraph& graph, double initial) {
  SpecialistSet s;
  s.tasks = graph.tasks();
  for (const auto& t : graph.tasks().names()) {
    s.specialists.push_back({t, PheromoneMatrix(graph.num_layers(), graph.width(), initial)});
  }
  return s;
}

void SpecialistSet::check_compatible(const LayeredGraph& graph) const {
  if (!(tasks == graph.tasks())) fail(ErrorKind::State, "snapshot task set does not match the graph");
  if (specialists.size() != tasks.size()) fail(ErrorKind::State, "snapshot must hold one specialist per task");
  for (std::size_t t = 0; t < specialists.size(); ++t) {
    if (specialists[t].task != tasks[t]) fail(ErrorKind::State, "snapshot specialists are out of task order");
    if (!specialists[t].tau.matches(graph)) fail(ErrorKind::State, "snapshot shape does not match the graph");
  }
}

FusedPheromone fuse_pheromone(std::span<const PheromoneSpecialist> specialists, const WeightVector& w) {
  if (specialists.empty()) fail(ErrorKind::Config, "no pheromone specialists to fuse");
  if (specialists.size() != w.size()) fail(ErrorKind::Config, "task-set mismatch between specialists and weights");
  const auto& first = specialists.front().tau;
  for (const auto& s : specialists) {
    if (!s.tau.same_shape(first)) fail(ErrorKind::Config, "specialist shape mismatch");
  }
  FusedPheromone fused = first;
  auto out = fused.values();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t t = 0; t < specialists.size(); ++t) {
    const double wt = w[t];
    if (wt == 0.0) continue;
    auto in = specialists[t].tau.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += wt * in[i];
  }
  return fused;
}

}  // namespace amro
