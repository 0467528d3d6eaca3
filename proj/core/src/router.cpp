#include "amro/router.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "amro/error.hpp"

namespace amro {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

}  // namespace

TableRouter::TableRouter(TaskSet tasks, std::map<std::string, WeightVector, std::less<>> table)
    : tasks_(std::move(tasks)), table_(std::move(table)) {
  for (const auto& [q, w] : table_) {
    if (w.size() != tasks_.size()) fail(ErrorKind::Config, "table entry for '" + q + "' has wrong task count");
  }
}

RouterOutput TableRouter::infer(std::string_view query) const {
  if (auto it = table_.find(query); it != table_.end()) return {it->second, false};
  return {WeightVector::uniform(tasks_.size()), true};
}

KeywordRouter::KeywordRouter(TaskSet tasks, std::vector<std::vector<std::string>> keywords)
    : tasks_(std::move(tasks)), keywords_(std::move(keywords)) {
  if (keywords_.size() != tasks_.size()) fail(ErrorKind::Config, "keyword lists must cover every task");
  for (auto& list : keywords_) {
    for (auto& k : list) k = lower(k);
  }
}

std::vector<double> KeywordRouter::hit_counts(std::string_view query) const {
  const std::string q = lower(query);
  std::vector<double> hits(tasks_.size(), 0.0);
  for (std::size_t t = 0; t < keywords_.size(); ++t) {
    for (const auto& k : keywords_[t]) hits[t] += static_cast<double>(count_occurrences(q, k));
  }
  return hits;
}

RouterOutput KeywordRouter::infer(std::string_view query) const {
  auto hits = hit_counts(query);
  double total = 0.0;
  for (double h : hits) total += h;
  if (total == 0.0) return {WeightVector::uniform(tasks_.size()), true};
  return {WeightVector(std::move(hits), true), false};
}

double kl_divergence(const WeightVector& target, const WeightVector& predicted) {
  if (target.size() != predicted.size()) fail(ErrorKind::Config, "weight vectors cover different task sets");
  double kl = 0.0;
  for (std::size_t t = 0; t < target.size(); ++t) {
    const double p = target[t];
    if (p == 0.0) continue;
    const double q = predicted[t];
    if (q == 0.0) fail(ErrorKind::Data, "infinite divergence");
    kl += p * std::log(p / q);
  }
  // Rounding can leave a tiny negative residue for identical inputs.
  return std::max(kl, 0.0);
}

RouterEvaluation evaluate_router(const IntentRouter& router, const std::vector<RouterSample>& dataset) {
  if (dataset.empty()) fail(ErrorKind::Data, "router evaluation dataset is empty");
  const std::size_t k = router.tasks().size();
  RouterEvaluation ev;
  ev.samples = dataset.size();
  ev.per_task_count.assign(k, 0);
  std::vector<std::size_t> per_task_hits(k, 0);
  double kl_sum = 0.0;
  std::size_t finite = 0;
  std::size_t hits = 0;

  for (const auto& s : dataset) {
    if (s.target.size() != k) fail(ErrorKind::Data, "sample target does not match the router's task set");
    const auto predicted = router.infer(s.query).weights;
    try {
      kl_sum += kl_divergence(s.target, predicted);
      ++finite;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Data) throw;
      ++ev.infinite_divergence;
    }
    const std::size_t truth = s.target.argmax();
    ++ev.per_task_count[truth];
    if (predicted.argmax() == truth) {
      ++hits;
      ++per_task_hits[truth];
    }
  }

  ev.mean_kl = finite ? kl_sum / static_cast<double>(finite) : std::numeric_limits<double>::infinity();
  ev.top1_accuracy = static_cast<double>(hits) / static_cast<double>(dataset.size());
  ev.per_task_accuracy.resize(k);
  for (std::size_t t = 0; t < k; ++t) {
    ev.per_task_accuracy[t] = ev.per_task_count[t]
                                  ? static_cast<double>(per_task_hits[t]) / static_cast<double>(ev.per_task_count[t])
                                  : std::numeric_limits<double>::quiet_NaN();
  }
  return ev;
}

}  // namespace amro
