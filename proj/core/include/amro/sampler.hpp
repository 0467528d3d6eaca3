#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "amro/graph.hpp"
#include "amro/heuristic.hpp"
#include "amro/pheromone.hpp"
#include "amro/rng.hpp"
#include "amro/task.hpp"

namespace amro {

struct SamplerParams {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.1;
  double lambda_A = 1.0;
  double lambda_L = 0.5;
  double lambda_R = 0.5;
  double epsilon = 1e-3;

  /// Throws Error(Config) on out-of-range fields.
  void validate() const;
};

struct TransitionProbs {
  std::vector<double> p;  // one entry per slot; zero outside the allowed set
  bool degenerate = false;  // heuristic vanished; pheromone-only weights were used
};

/// p_j proportional to tau_j^alpha * eta_j^beta over the allowed slots.
/// A zero exponent makes its factor 1 even for a zero base.
TransitionProbs transition_probs(std::span<const double> tau_row, std::span<const double> eta,
                                 std::span<const std::size_t> allowed, double alpha, double beta);

/// Selection law with the exploration safeguard:
///   gamma / |allowed| + (1 - gamma) * p_j   for j in allowed.
std::vector<double> exploration_mix(std::span<const double> probs, std::span<const std::size_t> allowed, double gamma);

/// Draws a slot: uniform over `allowed` with probability gamma, otherwise
/// from `probs`. A singleton set returns its element without drawing.
std::size_t sample_next(std::span<const double> probs, std::span<const std::size_t> allowed, double gamma, Rng& rng);

struct PathStats {
  std::size_t degenerate_heuristic = 0;
  std::size_t relaxed_layers = 0;  // layers where the load filter was lifted
};

/// Query-conditioned path construction over one specialist snapshot.
/// Fuses pheromone once, precomputes the fused heuristic per layer, and
/// chooses layer 0 from a virtual source row.
class PathSampler {
 public:
  PathSampler(const LayeredGraph& graph, const SpecialistSet& specialists, const WeightVector& w,
              const SamplerParams& params, const NormBounds& bounds);

  /// Feasible slots of `layer`. Falls back to every available slot when the
  /// load filter empties the set; throws Error(Infeasible) when none is
  /// available.
  std::vector<std::size_t> candidates(std::size_t layer, bool* relaxed = nullptr) const;

  /// Transition law for `layer` given the slots chosen for earlier layers.
  TransitionProbs step(std::size_t layer, std::span<const std::size_t> prefix,
                       std::span<const std::size_t> allowed) const;

  RoutePath sample(Rng& rng, PathStats* stats = nullptr) const;

  /// Argmax of the transition law at every layer (lowest slot on ties).
  RoutePath greedy() const;

  /// Probability of drawing `path` under the selection law with `gamma`.
  double probability(const RoutePath& path, double gamma) const;

  const FusedPheromone& fused() const noexcept { return fused_; }
  std::span<const double> fused_heuristic(std::size_t layer) const { return eta_[layer]; }

 private:
  const LayeredGraph& graph_;
  SamplerParams params_;
  FusedPheromone fused_;
  std::vector<std::vector<double>> eta_;  // [layer][slot]
};

inline RoutePath sample_path(const LayeredGraph& graph, const SpecialistSet& specialists, const WeightVector& w,
                             const SamplerParams& params, const NormBounds& bounds, Rng& rng,
                             PathStats* stats = nullptr) {
  return PathSampler(graph, specialists, w, params, bounds).sample(rng, stats);
}

}  // namespace amro
