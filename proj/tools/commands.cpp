#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <charconv>
#include <ctime>
#include <optional>

#include "amro/engine.hpp"
#include "amro/experiment.hpp"
#include "amro/io.hpp"

namespace amro::cli {

namespace fs = std::filesystem;

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
      return kConfig;
    case ErrorKind::State:
      return kState;
    case ErrorKind::Data:
      return kData;
    case ErrorKind::Infeasible:
    case ErrorKind::Internal:
      break;
  }
  return kInternal;
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Overrides change the outputs, so they enter the recorded config hash.
std::uint64_t with_override(std::uint64_t hash, const std::string& key, const std::string& value) {
  return fnv1a64(hash_hex(hash) + ";" + key + "=" + value);
}

void write_run_meta(const fs::path& out, const ArtifactMeta& meta, const std::string& command) {
  write_file(out / "run.meta.json", run_meta_json(meta, command, utc_timestamp()));
}

void require_out(const RunConfig& c) {
  if (c.out.empty()) fail(ErrorKind::Config, "--out is required");
}

Scenario scenario_of(const RunConfig& c) {
  if (c.scenario.empty()) fail(ErrorKind::Config, "--scenario is required");
  spdlog::debug("loading scenario {}", c.scenario.string());
  return load_scenario(c.scenario, c.seed);
}

Snapshot snapshot_for(const RunConfig& c, const LayeredGraph& graph) {
  if (c.snapshot.empty()) fail(ErrorKind::Config, "--snapshot is required");
  Snapshot snap = load_snapshot(c.snapshot);
  snap.specialists.check_compatible(graph);
  return snap;
}

}  // namespace

std::vector<std::size_t> parse_levels(const std::string& csv) {
  std::vector<std::size_t> levels;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t end = std::min(csv.find(',', pos), csv.size());
    const std::string_view item(csv.data() + pos, end - pos);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() || v == 0) {
      fail(ErrorKind::Config, "invalid --levels entry '" + std::string(item) + "'");
    }
    if (!levels.empty() && v <= levels.back()) fail(ErrorKind::Config, "--levels must be strictly increasing");
    levels.push_back(v);
    pos = end + 1;
  }
  return levels;
}

void cmd_warmup(const RunConfig& c) {
  require_out(c);
  const Scenario s = scenario_of(c);
  const Deployment d = make_deployment(s);
  ArtifactMeta meta{std::string(kToolVersion), s.config_hash, s.seed};
  const std::size_t iterations = c.iterations.value_or(s.warmup.iterations);
  if (c.iterations) meta.config_hash = with_override(meta.config_hash, "iterations", std::to_string(iterations));

  spdlog::info("warm-up: {} tasks, {} iterations", s.graph.tasks.size(), iterations);
  const WarmupResult w = run_warmup(s, d, iterations, s.seed);
  for (std::size_t t = 0; t < s.graph.tasks.size(); ++t) {
    if (const auto row = w.report.final_row(t)) {
      spdlog::info("  {}: modal {} p={:.4f}", s.graph.tasks[t], to_string(row->modal_path), row->modal_path_prob);
    }
  }
  save_snapshot(c.out / "snapshot.json", w.specialists, meta);
  write_file(c.out / "warmup.csv", warmup_csv(w.report, s.graph.tasks, meta));
  write_run_meta(c.out, meta, "warmup");
}

void cmd_simulate(const RunConfig& c) {
  require_out(c);
  Scenario s = scenario_of(c);
  Deployment d = make_deployment(s);
  Snapshot snap = snapshot_for(c, d.graph);
  ArtifactMeta meta{std::string(kToolVersion), s.config_hash, s.seed};
  meta.config_hash = with_override(meta.config_hash, "snapshot", hash_hex(fnv1a64(snapshot_to_json(snap.specialists, snap.meta))));
  if (c.queries) {
    if (*c.queries == 0) fail(ErrorKind::Config, "--queries must be >= 1");
    s.workload.count = *c.queries;
    meta.config_hash = with_override(meta.config_hash, "queries", std::to_string(*c.queries));
  }
  const auto queries = scenario_workload(s);

  AmroEngine engine(d.graph, d.router, std::move(snap.specialists), s.sampler);
  std::optional<OnlineEvolver> evolver;
  if (s.evolution.sampling_rate > 0.0) {
    EvolverConfig ec;
    ec.params = s.evolution.params;
    ec.sampling_rate = s.evolution.sampling_rate;
    ec.batch_size = s.evolution.batch_size;
    ec.cost = s.cost.weights;
    evolver.emplace(engine.snapshots(), make_judge(s.evolution.judge), ec);
  }
  spdlog::info("serving {} queries (evolution {})", queries.size(), evolver ? "on" : "off");
  const ServeSummary summary =
      serve_sequential(engine, *d.pool, queries, s.cost.weights, evolver ? &*evolver : nullptr, s.seed);
  std::optional<EvolverStats> stats;
  if (evolver) {
    evolver->flush();
    stats = evolver->stats();
  }

  write_file(c.out / "route_log.jsonl", route_log_jsonl(summary, s.graph.tasks, meta));
  write_file(c.out / "summary.json", serve_summary_json(summary, stats ? &*stats : nullptr, meta));
  save_snapshot(c.out / "snapshot.json", *engine.snapshots().load(), meta);
  write_run_meta(c.out, meta, "simulate");
}

void cmd_stress(const RunConfig& c) {
  require_out(c);
  const Scenario s = scenario_of(c);
  const Deployment d = make_deployment(s);
  ArtifactMeta meta{std::string(kToolVersion), s.config_hash, s.seed};
  std::vector<std::size_t> levels = s.levels;
  if (!c.levels.empty()) {
    levels = parse_levels(c.levels);
    meta.config_hash = with_override(meta.config_hash, "levels", c.levels);
  }

  SpecialistSet specialists;
  if (!c.snapshot.empty()) {
    Snapshot snap = snapshot_for(c, d.graph);
    meta.config_hash =
        with_override(meta.config_hash, "snapshot", hash_hex(fnv1a64(snapshot_to_json(snap.specialists, snap.meta))));
    specialists = std::move(snap.specialists);
  } else {
    const std::size_t iterations = c.iterations.value_or(s.warmup.iterations);
    if (c.iterations) meta.config_hash = with_override(meta.config_hash, "iterations", std::to_string(iterations));
    spdlog::info("no snapshot given; warming up for {} iterations", iterations);
    specialists = run_warmup(s, d, iterations, s.seed).specialists;
  }

  spdlog::info("stress: {} levels", levels.size());
  const StressReport report = run_stress(s, d, specialists, levels, s.seed);
  for (const auto& sys : report.systems) {
    for (const auto& l : sys.levels) {
      spdlog::info("  {} x{}: time {:.2f}s speedup {:.2f} accuracy {:.4f}", sys.system, l.workers, l.wall_time,
                   l.speedup, l.accuracy);
    }
  }
  write_file(c.out / "stress.csv", stress_long_csv(report, meta));
  write_file(c.out / "stress_table.csv", stress_table_csv(report, meta));
  write_run_meta(c.out, meta, "stress");
}

void cmd_export_heatmap(const RunConfig& c) {
  require_out(c);
  if (c.snapshot.empty()) fail(ErrorKind::Config, "--snapshot is required");
  const Snapshot snap = load_snapshot(c.snapshot);
  ArtifactMeta meta = snap.meta;
  if (c.seed) meta.seed = *c.seed;
  for (const auto& sp : snap.specialists.specialists) {
    write_file(c.out / ("heatmap_" + sp.task + ".csv"), heatmap_csv(sp.tau, meta));
  }
  if (snap.specialists.specialists.empty()) fail(ErrorKind::Data, "snapshot holds no specialists");
  const std::size_t width = snap.specialists.specialists.front().tau.width();
  write_file(c.out / "entropy.csv", entropy_csv(entropy_summary(snap.specialists), width, meta));
  write_run_meta(c.out, meta, "export-heatmap");
}

void cmd_eval_router(const RunConfig& c) {
  require_out(c);
  if (c.router.empty()) fail(ErrorKind::Config, "--router is required");
  if (c.dataset.empty()) fail(ErrorKind::Config, "--dataset is required");
  if (!fs::exists(c.router)) fail(ErrorKind::Config, "cannot open router config: " + c.router.string());
  if (!fs::exists(c.dataset)) fail(ErrorKind::Config, "cannot open dataset: " + c.dataset.string());
  const std::string router_text = read_file(c.router);
  const std::string dataset_text = read_file(c.dataset);
  const RouterConfig rc = parse_router_config(router_text);
  const auto router = make_router(rc);
  const auto samples = parse_router_dataset(dataset_text, rc.tasks);
  const RouterEvaluation eval = evaluate_router(*router, samples);
  ArtifactMeta meta{std::string(kToolVersion), fnv1a64(router_text + '\n' + dataset_text), c.seed.value_or(0)};
  spdlog::info("router {}: top1 {:.4f} mean_kl {:.4f} over {} samples", rc.type, eval.top1_accuracy, eval.mean_kl,
               samples.size());
  write_file(c.out / "router_eval.json", router_eval_json(eval, rc.tasks, meta));
  write_run_meta(c.out, meta, "eval-router");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive multi-agent routing: warm-up, serving simulation and stress experiments", "amro"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  RunConfig c;
  std::uint64_t seed = 0;
  std::size_t iterations = 0, queries = 0;

  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", c.out, "Output directory")->required(); };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed, "Global seed (overrides the scenario)"); };

  auto* warm = app.add_subcommand("warmup", "Warm up per-task specialists and write a pheromone snapshot");
  warm->add_option("--scenario", c.scenario, "Scenario JSON")->required();
  add_out(warm);
  add_seed(warm);
  warm->add_option("--iterations", iterations, "Warm-up iterations per task");

  auto* sim = app.add_subcommand("simulate", "Serve the scenario workload from a snapshot with online evolution");
  sim->add_option("--scenario", c.scenario, "Scenario JSON")->required();
  sim->add_option("--snapshot", c.snapshot, "Pheromone snapshot")->required();
  add_out(sim);
  add_seed(sim);
  sim->add_option("--queries", queries, "Override the workload size");

  auto* stress = app.add_subcommand("stress", "Concurrency stress test against weighted round robin");
  stress->add_option("--scenario", c.scenario, "Scenario JSON")->required();
  add_out(stress);
  add_seed(stress);
  stress->add_option("--levels", c.levels, "Comma separated worker counts");
  stress->add_option("--snapshot", c.snapshot, "Pheromone snapshot (warm-up runs inline when absent)");
  stress->add_option("--iterations", iterations, "Inline warm-up iterations");

  auto* heat = app.add_subcommand("export-heatmap", "Export raw pheromone matrices and row entropies as CSV");
  heat->add_option("--snapshot", c.snapshot, "Pheromone snapshot")->required();
  add_out(heat);
  add_seed(heat);

  auto* eval = app.add_subcommand("eval-router", "Score an intent router on a labelled JSONL dataset");
  eval->add_option("--router", c.router, "Router config JSON")->required();
  eval->add_option("--dataset", c.dataset, "JSONL dataset")->required();
  add_out(eval);
  add_seed(eval);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  }
  for (auto* sub : {warm, stress}) {
    if (sub->parsed() && sub->count("--iterations")) c.iterations = iterations;
  }
  if (sim->parsed() && sim->count("--queries")) c.queries = queries;
  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed")) c.seed = seed;
  }

  try {
    if (warm->parsed()) cmd_warmup(c);
    if (sim->parsed()) cmd_simulate(c);
    if (stress->parsed()) cmd_stress(c);
    if (heat->parsed()) cmd_export_heatmap(c);
    if (eval->parsed()) cmd_eval_router(c);
  } catch (const Error& e) {
    err << "amro: error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "amro: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}

}  // namespace amro::cli
