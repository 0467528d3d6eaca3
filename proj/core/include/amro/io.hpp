#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amro/cost.hpp"
#include "amro/engine.hpp"
#include "amro/evolution.hpp"
#include "amro/graph.hpp"
#include "amro/pheromone.hpp"
#include "amro/router.hpp"
#include "amro/sampler.hpp"
#include "amro/sim.hpp"
#include "amro/stress.hpp"

namespace amro {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Reproducibility header carried by every artifact.
struct ArtifactMeta {
  std::string tool_version{kToolVersion};
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ArtifactMeta&, const ArtifactMeta&) = default;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::uint64_t hash);
/// Shortest decimal that parses back to the same double.
std::string format_double(double v);
/// "# tool=amro version=... config_hash=... seed=..." line for CSV files.
std::string csv_header_comment(const ArtifactMeta& meta);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// ---------------------------------------------------------------------------
// Configuration

GraphConfig parse_graph_config(std::string_view json_text);

struct RouterConfig {
  std::string type;  // "table" | "keyword" | "uniform"
  TaskSet tasks;
  std::map<std::string, WeightVector, std::less<>> table;
  std::vector<std::vector<std::string>> keywords;  // by task index
};
RouterConfig parse_router_config(std::string_view json_text);
std::shared_ptr<const IntentRouter> make_router(const RouterConfig& config);

struct CostConfig {
  CostWeights weights;
  PriceTable prices;
};
CostConfig parse_cost_config(std::string_view json_text);

struct JudgeConfig {
  std::string type = "threshold";  // "threshold" | "accept_all" | "reject_all"
  double threshold = 0.5;
};
std::shared_ptr<const QualityJudge> make_judge(const JudgeConfig& config);

struct EvolutionConfig {
  EvolutionParams params;
  double sampling_rate = 0.1;
  std::size_t batch_size = 32;
  JudgeConfig judge;
};
EvolutionConfig parse_evolution_config(std::string_view json_text);
SamplerParams parse_sampler_params(std::string_view json_text);

/// Fully resolved experiment description.
struct Scenario {
  GraphConfig graph;
  std::vector<AgentModel> agents;  // one per node
  double theta_soft = 0.8;
  WorkloadSpec workload;
  CostConfig cost;
  SamplerParams sampler;
  EvolutionConfig evolution;
  std::optional<RouterConfig> router;  // keyword router over the default vocabulary when absent
  WarmupConfig warmup;
  double initial_pheromone = 1.0;
  std::vector<std::size_t> levels;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;  // over the resolved scenario, excluding the seed
};

/// Nested graph_config and router_config may be inline objects or paths
/// relative to `base_dir`. A given `seed` replaces the file's global seed
/// before nested seeds default from it.
Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir,
                        std::optional<std::uint64_t> seed = std::nullopt);
/// Throws Error(Config) naming the path when it cannot be read.
Scenario load_scenario(const std::filesystem::path& path, std::optional<std::uint64_t> seed = std::nullopt);

std::shared_ptr<const IntentRouter> scenario_router(const Scenario& scenario);

// ---------------------------------------------------------------------------
// Snapshots

struct Snapshot {
  SpecialistSet specialists;
  ArtifactMeta meta;
};

std::string snapshot_to_json(const SpecialistSet& specialists, const ArtifactMeta& meta);
/// Throws Error(Data) on malformed input.
Snapshot snapshot_from_json(std::string_view json_text);
void save_snapshot(const std::filesystem::path& path, const SpecialistSet& specialists, const ArtifactMeta& meta);
Snapshot load_snapshot(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Reports

/// Shannon entropy (nats) of a nonnegative row after normalization.
double row_entropy(std::span<const double> row);

struct EntropyRow {
  std::string task;
  std::string from;  // "source" or "L<layer>N<slot>"
  double entropy = 0.0;
};
std::vector<EntropyRow> entropy_summary(const SpecialistSet& specialists);

/// Rows are from-nodes (virtual source first), columns the slots of the next layer.
std::string heatmap_csv(const PheromoneMatrix& tau, const ArtifactMeta& meta);
std::string entropy_csv(const std::vector<EntropyRow>& rows, std::size_t width, const ArtifactMeta& meta);

std::string warmup_csv(const WarmupReport& report, const TaskSet& tasks, const ArtifactMeta& meta);

/// One row per (system, level).
std::string stress_long_csv(const StressReport& report, const ArtifactMeta& meta);
/// level, time_s, speedup, accuracy_ours, accuracy_wrr; systems[0] is ours.
std::string stress_table_csv(const StressReport& report, const ArtifactMeta& meta);

std::vector<RouterSample> parse_router_dataset(std::string_view jsonl, const TaskSet& tasks);
std::string router_eval_json(const RouterEvaluation& eval, const TaskSet& tasks, const ArtifactMeta& meta);

std::string route_log_jsonl(const ServeSummary& summary, const TaskSet& tasks, const ArtifactMeta& meta);
std::string serve_summary_json(const ServeSummary& summary, const EvolverStats* stats, const ArtifactMeta& meta);

/// Sidecar carrying the wall-clock timestamp and command line.
std::string run_meta_json(const ArtifactMeta& meta, std::string_view command, std::string_view timestamp);

}  // namespace amro
