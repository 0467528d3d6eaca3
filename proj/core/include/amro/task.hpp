#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace amro {

/// Ordered, duplicate-free list of task identifiers. The order is the
/// indexing contract for weight vectors and pheromone specialists.
class TaskSet {
 public:
  TaskSet() = default;
  explicit TaskSet(std::vector<std::string> tasks);

  std::size_t size() const noexcept { return tasks_.size(); }
  bool empty() const noexcept { return tasks_.empty(); }
  const std::string& operator[](std::size_t i) const { return tasks_[i]; }
  const std::vector<std::string>& names() const noexcept { return tasks_; }

  std::optional<std::size_t> find(std::string_view task) const;
  /// Throws Error(Config) for unknown tasks.
  std::size_t index_of(std::string_view task) const;

  friend bool operator==(const TaskSet&, const TaskSet&) = default;

 private:
  std::vector<std::string> tasks_;
};

/// Normalized task-mixture distribution over a TaskSet.
class WeightVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  WeightVector() = default;
  /// Validates non-negativity and renormalizes. A sum further than 1e-9 from
  /// one is rejected unless `renormalize` is set.
  explicit WeightVector(std::vector<double> weights, bool renormalize = false);

  static WeightVector uniform(std::size_t k);
  static WeightVector one_hot(std::size_t k, std::size_t index);

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> values() const noexcept { return w_; }

  /// Lowest index among maximal entries.
  std::size_t argmax() const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> w_;
};

}  // namespace amro
