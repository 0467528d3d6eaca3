#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "amro/task.hpp"

namespace amro {

struct RouterOutput {
  WeightVector weights;
  // Advisory: the router fell back to the uniform vector.
  bool low_confidence = false;
};

/// Maps a query onto a task-mixture weight vector. Implementations are
/// immutable after construction and safe for concurrent callers.
class IntentRouter {
 public:
  virtual ~IntentRouter() = default;
  virtual const TaskSet& tasks() const = 0;
  virtual RouterOutput infer(std::string_view query) const = 0;
};

inline RouterOutput infer_weights(const IntentRouter& router, std::string_view query) { return router.infer(query); }

/// Exact query -> target lookup; unknown queries map to uniform.
class TableRouter final : public IntentRouter {
 public:
  TableRouter(TaskSet tasks, std::map<std::string, WeightVector, std::less<>> table);

  const TaskSet& tasks() const override { return tasks_; }
  RouterOutput infer(std::string_view query) const override;

 private:
  TaskSet tasks_;
  std::map<std::string, WeightVector, std::less<>> table_;
};

/// weight_t = hits_t / sum(hits), where hits_t counts case-insensitive,
/// non-overlapping occurrences of task t's keywords in the query.
class KeywordRouter final : public IntentRouter {
 public:
  /// keywords[t] lists the phrases for task index t.
  KeywordRouter(TaskSet tasks, std::vector<std::vector<std::string>> keywords);

  const TaskSet& tasks() const override { return tasks_; }
  RouterOutput infer(std::string_view query) const override;

  std::vector<double> hit_counts(std::string_view query) const;

 private:
  TaskSet tasks_;
  std::vector<std::vector<std::string>> keywords_;  // lower-cased
};

/// Always uniform; the ablation floor for router evaluation.
class UniformRouter final : public IntentRouter {
 public:
  explicit UniformRouter(TaskSet tasks) : tasks_(std::move(tasks)) {}
  const TaskSet& tasks() const override { return tasks_; }
  RouterOutput infer(std::string_view) const override { return {WeightVector::uniform(tasks_.size()), true}; }

 private:
  TaskSet tasks_;
};

/// KL(target || predicted) in nats. Throws Error(Data) "infinite divergence"
/// when predicted has zero mass where target does not.
double kl_divergence(const WeightVector& target, const WeightVector& predicted);

struct RouterSample {
  std::string query;
  WeightVector target;
};

struct RouterEvaluation {
  double mean_kl = 0.0;  // over finite-divergence samples
  double top1_accuracy = 0.0;
  std::vector<double> per_task_accuracy;  // by target argmax; NaN when a task has no samples
  std::vector<std::size_t> per_task_count;
  std::size_t samples = 0;
  std::size_t infinite_divergence = 0;
};

RouterEvaluation evaluate_router(const IntentRouter& router, const std::vector<RouterSample>& dataset);

}  // namespace amro
