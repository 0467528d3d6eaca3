#include "amro/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amro/error.hpp"

namespace amro {
namespace {

double power(double base, double exponent) { return exponent == 0.0 ? 1.0 : std::pow(base, exponent); }

}  // namespace

void SamplerParams::validate() const {
  if (!(alpha >= 0.0 && std::isfinite(alpha))) fail(ErrorKind::Config, "alpha must be >= 0");
  if (!(beta >= 0.0 && std::isfinite(beta))) fail(ErrorKind::Config, "beta must be >= 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail(ErrorKind::Config, "gamma must lie in [0,1]");
  if (!(lambda_A >= 0.0 && lambda_L >= 0.0 && lambda_R >= 0.0)) fail(ErrorKind::Config, "lambda weights must be >= 0");
  if (!(epsilon > 0.0)) fail(ErrorKind::Config, "epsilon must be > 0");
}

TransitionProbs transition_probs(std::span<const double> tau_row, std::span<const double> eta,
                                 std::span<const std::size_t> allowed, double alpha, double beta) {
  if (allowed.empty()) fail(ErrorKind::Infeasible, "no feasible successor");
  if (tau_row.size() != eta.size()) fail(ErrorKind::Config, "pheromone row and heuristic differ in length");

  // Scaling by the row maxima leaves the law unchanged and keeps the powers finite.
  double tau_max = 0.0;
  double eta_max = 0.0;
  for (std::size_t j : allowed) {
    if (j >= tau_row.size()) fail(ErrorKind::Config, "allowed slot out of range");
    if (!(tau_row[j] > 0.0)) fail(ErrorKind::Config, "pheromone must be strictly positive");
    if (!(eta[j] >= 0.0)) fail(ErrorKind::Config, "heuristic must be >= 0");
    tau_max = std::max(tau_max, tau_row[j]);
    eta_max = std::max(eta_max, eta[j]);
  }

  TransitionProbs out;
  out.p.assign(tau_row.size(), 0.0);
  auto fill = [&](double eff_beta) {
    double total = 0.0;
    for (std::size_t j : allowed) {
      const double eta_term = eff_beta == 0.0 ? 1.0 : power(eta[j] / eta_max, eff_beta);
      out.p[j] = power(tau_row[j] / tau_max, alpha) * eta_term;
      total += out.p[j];
    }
    return total;
  };

  double total = (beta != 0.0 && eta_max == 0.0) ? 0.0 : fill(beta);
  if (!(total > 0.0)) {
    out.degenerate = true;
    std::fill(out.p.begin(), out.p.end(), 0.0);
    total = fill(0.0);
  }
  for (std::size_t j : allowed) out.p[j] /= total;
  return out;
}

std::vector<double> exploration_mix(std::span<const double> probs, std::span<const std::size_t> allowed,
                                    double gamma) {
  std::vector<double> mix(probs.size(), 0.0);
  const double uniform = 1.0 / static_cast<double>(allowed.size());
  for (std::size_t j : allowed) mix[j] = gamma * uniform + (1.0 - gamma) * probs[j];
  return mix;
}

std::size_t sample_next(std::span<const double> probs, std::span<const std::size_t> allowed, double gamma, Rng& rng) {
  if (allowed.empty()) fail(ErrorKind::Infeasible, "no feasible successor");
  if (allowed.size() == 1) return allowed.front();
  if (gamma > 0.0 && rng.uniform() < gamma) return allowed[rng.index(allowed.size())];

  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last_positive = allowed.front();
  for (std::size_t j : allowed) {
    if (probs[j] <= 0.0) continue;
    acc += probs[j];
    last_positive = j;
    if (u < acc) return j;
  }
  return last_positive;
}

PathSampler::PathSampler(const LayeredGraph& graph, const SpecialistSet& specialists, const WeightVector& w,
                         const SamplerParams& params, const NormBounds& bounds)
    : graph_(graph), params_(params), fused_(fuse_pheromone(specialists.specialists, w)) {
  params_.validate();
  if (!fused_.matches(graph)) fail(ErrorKind::State, "pheromone shape does not match the graph");
  const std::size_t k = graph.tasks().size();
  if (w.size() != k) fail(ErrorKind::Config, "task-set mismatch between weights and graph");

  eta_.resize(graph.num_layers());
  std::vector<std::vector<double>> per_task(k, std::vector<double>(graph.width()));
  for (std::size_t l = 0; l < graph.num_layers(); ++l) {
    for (std::size_t j = 0; j < graph.width(); ++j) {
      const NodeId id{l, j};
      const auto& prof = graph.profile(id);
      const auto tel = graph.telemetry(id);
      for (std::size_t t = 0; t < k; ++t) {
        per_task[t][j] = w[t] == 0.0 ? 0.0 : node_heuristic(prof, tel, t, params_, bounds);
      }
    }
    eta_[l] = fuse_heuristic(per_task, w);
  }
}

std::vector<std::size_t> PathSampler::candidates(std::size_t layer, bool* relaxed) const {
  auto allowed = allowed_in_layer(graph_, layer, graph_.theta_load());
  if (relaxed) *relaxed = false;
  if (!allowed.empty()) return allowed;
  allowed = allowed_in_layer(graph_, layer, std::numeric_limits<double>::infinity());
  if (allowed.empty()) fail(ErrorKind::Infeasible, "no feasible successor at layer " + std::to_string(layer));
  if (relaxed) *relaxed = true;
  return allowed;
}

TransitionProbs PathSampler::step(std::size_t layer, std::span<const std::size_t> prefix,
                                  std::span<const std::size_t> allowed) const {
  return transition_probs(fused_.incoming_row(layer, prefix), eta_[layer], allowed, params_.alpha, params_.beta);
}

RoutePath PathSampler::sample(Rng& rng, PathStats* stats) const {
  RoutePath path;
  path.slots.reserve(graph_.num_layers());
  for (std::size_t l = 0; l < graph_.num_layers(); ++l) {
    bool relaxed = false;
    const auto allowed = candidates(l, &relaxed);
    const auto probs = step(l, path.slots, allowed);
    if (stats) {
      stats->relaxed_layers += relaxed ? 1 : 0;
      stats->degenerate_heuristic += probs.degenerate ? 1 : 0;
    }
    path.slots.push_back(sample_next(probs.p, allowed, params_.gamma, rng));
  }
  return path;
}

RoutePath PathSampler::greedy() const {
  RoutePath path;
  for (std::size_t l = 0; l < graph_.num_layers(); ++l) {
    const auto allowed = candidates(l);
    const auto probs = step(l, path.slots, allowed);
    std::size_t best = allowed.front();
    for (std::size_t j : allowed) {
      if (probs.p[j] > probs.p[best]) best = j;
    }
    path.slots.push_back(best);
  }
  return path;
}

double PathSampler::probability(const RoutePath& path, double gamma) const {
  graph_.validate(path);
  double prob = 1.0;
  for (std::size_t l = 0; l < graph_.num_layers(); ++l) {
    const auto allowed = candidates(l);
    if (std::find(allowed.begin(), allowed.end(), path.slots[l]) == allowed.end()) return 0.0;
    if (allowed.size() == 1) continue;
    const auto probs = step(l, std::span(path.slots).first(l), allowed);
    prob *= exploration_mix(probs.p, allowed, gamma)[path.slots[l]];
  }
  return prob;
}

}  // namespace amro
