#include "amro/task.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "amro/error.hpp"

namespace amro {

TaskSet::TaskSet(std::vector<std::string> tasks) : tasks_(std::move(tasks)) {
  if (tasks_.empty()) fail(ErrorKind::Config, "task set must not be empty");
  std::unordered_set<std::string> seen;
  for (const auto& t : tasks_) {
    if (t.empty()) fail(ErrorKind::Config, "task identifier must not be empty");
    if (!seen.insert(t).second) fail(ErrorKind::Config, "duplicate task identifier '" + t + "'");
  }
}

std::optional<std::size_t> TaskSet::find(std::string_view task) const {
  auto it = std::find(tasks_.begin(), tasks_.end(), task);
  if (it == tasks_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - tasks_.begin());
}

std::size_t TaskSet::index_of(std::string_view task) const {
  if (auto i = find(task)) return *i;
  fail(ErrorKind::Config, "unknown task '" + std::string(task) + "'");
}

WeightVector::WeightVector(std::vector<double> weights, bool renormalize) : w_(std::move(weights)) {
  if (w_.empty()) fail(ErrorKind::Config, "weight vector must not be empty");
  double sum = 0.0;
  for (double x : w_) {
    if (!std::isfinite(x) || x < 0.0) fail(ErrorKind::Config, "weight vector entries must be finite and >= 0");
    sum += x;
  }
  if (sum <= 0.0) fail(ErrorKind::Config, "weight vector must have positive mass");
  if (!renormalize && std::abs(sum - 1.0) > kSumTolerance) {
    fail(ErrorKind::Config, "weight vector must sum to 1");
  }
  if (sum != 1.0) {
    for (double& x : w_) x /= sum;
  }
}

WeightVector WeightVector::uniform(std::size_t k) {
  return WeightVector(std::vector<double>(k, 1.0 / static_cast<double>(k)), true);
}

WeightVector WeightVector::one_hot(std::size_t k, std::size_t index) {
  std::vector<double> w(k, 0.0);
  w.at(index) = 1.0;
  return WeightVector(std::move(w));
}

std::size_t WeightVector::argmax() const {
  return static_cast<std::size_t>(std::max_element(w_.begin(), w_.end()) - w_.begin());
}

}  // namespace amro
