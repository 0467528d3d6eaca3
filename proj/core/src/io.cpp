#include "amro/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "amro/error.hpp"

namespace amro {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, ErrorKind kind, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(kind, std::string(what) + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::Config, std::string("field '") + key + "' has the wrong type");
  }
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorKind::Config, std::string("missing field '") + key + "'");
  return *it;
}

std::vector<double> task_values(const json& j, const TaskSet& tasks, const char* what) {
  std::vector<double> v(tasks.size(), 0.0);
  if (j.is_array()) {
    if (j.size() != tasks.size()) fail(ErrorKind::Config, std::string(what) + ": expected one value per task");
    for (std::size_t t = 0; t < tasks.size(); ++t) v[t] = j[t].get<double>();
  } else if (j.is_object()) {
    for (auto& [name, value] : j.items()) v[tasks.index_of(name)] = value.get<double>();
  } else {
    fail(ErrorKind::Config, std::string(what) + ": expected an array or an object keyed by task");
  }
  return v;
}

WeightVector weight_vector(const json& j, const TaskSet& tasks, const char* what, bool renormalize = false) {
  return WeightVector(task_values(j, tasks, what), renormalize);
}

Jittered jittered(const json& j, Jittered fallback) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  return {get_or(j, "mean", fallback.mean), get_or(j, "jitter", fallback.jitter)};
}

void apply_agent_fields(AgentModel& a, const json& j, const TaskSet& tasks) {
  if (auto it = j.find("base_quality"); it != j.end()) {
    if (it->is_object()) {
      for (auto& [name, value] : it->items()) a.base_quality[tasks.index_of(name)] = value.get<double>();
    } else {
      a.base_quality = task_values(*it, tasks, "base_quality");
    }
  }
  if (auto it = j.find("latency"); it != j.end()) a.latency = jittered(*it, a.latency);
  if (auto it = j.find("latency_dist"); it != j.end()) a.latency = jittered(*it, a.latency);
  if (auto it = j.find("tokens"); it != j.end()) a.tokens = jittered(*it, a.tokens);
  if (auto it = j.find("token_dist"); it != j.end()) a.tokens = jittered(*it, a.tokens);
  a.input_tokens = get_or(j, "input_tokens", a.input_tokens);
  a.load_sensitivity = get_or(j, "load_sensitivity", a.load_sensitivity);
  a.capacity = get_or(j, "capacity", a.capacity);
  a.quality_jitter = get_or(j, "quality_jitter", a.quality_jitter);
}

LoadStat parse_load_stat(const std::string& s) {
  if (s == "max") return LoadStat::Max;
  if (s == "mean") return LoadStat::Mean;
  fail(ErrorKind::Config, "load_stat must be 'max' or 'mean'");
}

// Inline object or a path relative to base_dir; returns the resolved object.
json resolve_ref(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_string()) return j;
  const auto path = base_dir / j.get<std::string>();
  return parse_json(read_file(path), ErrorKind::Config, path.string());
}

json meta_json(const ArtifactMeta& meta) {
  return {{"tool_version", meta.tool_version}, {"config_hash", hash_hex(meta.config_hash)}, {"seed", meta.seed}};
}

ArtifactMeta meta_from_json(const json& j) {
  ArtifactMeta m;
  m.tool_version = j.at("tool_version").get<std::string>();
  const auto hex = j.at("config_hash").get<std::string>();
  auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), m.config_hash, 16);
  if (ec != std::errc{} || p != hex.data() + hex.size()) fail(ErrorKind::Data, "bad config_hash in snapshot");
  m.seed = j.at("seed").get<std::uint64_t>();
  return m;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string node_label(std::size_t layer, std::size_t slot) {
  return "L" + std::to_string(layer) + "N" + std::to_string(slot);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  auto [p, ec] = std::to_chars(buf, buf + 16, hash, 16);
  std::string s(buf, p);
  return std::string(16 - s.size(), '0') + s;
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string csv_header_comment(const ArtifactMeta& meta) {
  return "# tool=amro version=" + meta.tool_version + " config_hash=" + hash_hex(meta.config_hash) +
         " seed=" + std::to_string(meta.seed) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Config, "cannot open file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Config, "cannot write file: " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorKind::Internal, "write failed: " + path.string());
}

// ---------------------------------------------------------------------------

namespace {

GraphConfig graph_config_from(const json& j, std::uint64_t fallback_seed) {
  try {
    GraphConfig c;
    c.num_layers = require(j, "num_layers").get<std::size_t>();
    c.nodes_per_layer = require(j, "nodes_per_layer").get<std::size_t>();
    c.tasks = TaskSet(require(j, "tasks").get<std::vector<std::string>>());
    if (!j.contains("nodes")) {
      GraphConfig g = GraphConfig::generate(c.num_layers, c.nodes_per_layer, c.tasks,
                                            get_or<std::uint64_t>(j, "seed", fallback_seed));
      g.theta_load = get_or(j, "theta_load", g.theta_load);
      g.response_window = get_or(j, "response_window", g.response_window);
      return g;
    }
    for (const auto& n : j.at("nodes")) {
      NodeProfile p;
      p.id = {require(n, "layer").get<std::size_t>(), require(n, "slot").get<std::size_t>()};
      p.backbone = get_or<std::string>(n, "backbone", "");
      p.policy = get_or<std::string>(n, "policy", "");
      const auto& ab = require(n, "ability");
      if (ab.is_object() && ab.size() != c.tasks.size()) fail(ErrorKind::Config, "incomplete ability map");
      p.ability = task_values(ab, c.tasks, "ability");
      c.nodes.push_back(std::move(p));
    }
    c.theta_load = get_or(j, "theta_load", c.theta_load);
    c.response_window = get_or(j, "response_window", c.response_window);
    return c;
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("graph config: ") + e.what());
  }
}

RouterConfig router_config_from(const json& j) {
  try {
    RouterConfig c;
    c.type = require(j, "type").get<std::string>();
    c.tasks = TaskSet(require(j, "tasks").get<std::vector<std::string>>());
    if (c.type == "table") {
      for (const auto& row : require(j, "table")) {
        c.table.emplace(require(row, "query").get<std::string>(), weight_vector(require(row, "weights"), c.tasks, "weights"));
      }
    } else if (c.type == "keyword") {
      c.keywords.assign(c.tasks.size(), {});
      for (auto& [name, words] : require(j, "keywords").items()) {
        c.keywords[c.tasks.index_of(name)] = words.get<std::vector<std::string>>();
      }
    } else if (c.type != "uniform") {
      fail(ErrorKind::Config, "unknown router type '" + c.type + "'");
    }
    return c;
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("router config: ") + e.what());
  }
}

CostConfig cost_config_from(const json& j) {
  try {
    CostConfig c;
    c.weights.omega_tok = get_or(j, "omega_tok", 0.0);
    c.weights.omega_lat = get_or(j, "omega_lat", 0.0);
    c.weights.omega_load = get_or(j, "omega_load", 0.0);
    c.weights.lambda = get_or(j, "lambda", 1.0);
    c.weights.load_stat = parse_load_stat(get_or<std::string>(j, "load_stat", "max"));
    c.weights.validate();
    if (auto it = j.find("price_table"); it != j.end() && !it->is_null()) {
      c.prices = PriceTable(it->get<std::map<std::string, double>>());
    }
    return c;
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("cost config: ") + e.what());
  }
}

EvolutionConfig evolution_config_from(const json& j) {
  try {
    EvolutionConfig c;
    c.params.rho = get_or(j, "rho", c.params.rho);
    c.params.Q = get_or(j, "Q", c.params.Q);
    c.params.epsilon = get_or(j, "epsilon", c.params.epsilon);
    const auto scope = get_or<std::string>(j, "online_evaporation", "path");
    if (scope == "path") {
      c.params.online_evaporation = EvaporationScope::Path;
    } else if (scope == "global") {
      c.params.online_evaporation = EvaporationScope::Global;
    } else {
      fail(ErrorKind::Config, "online_evaporation must be 'path' or 'global'");
    }
    c.params.validate();
    c.sampling_rate = get_or(j, "sampling_rate", c.sampling_rate);
    c.batch_size = get_or(j, "batch_size", c.batch_size);
    if (!(c.sampling_rate >= 0.0 && c.sampling_rate <= 1.0)) fail(ErrorKind::Config, "sampling_rate must be in [0,1]");
    if (c.batch_size == 0) fail(ErrorKind::Config, "batch_size must be positive");
    if (auto it = j.find("judge"); it != j.end()) {
      c.judge.type = get_or<std::string>(*it, "type", c.judge.type);
      c.judge.threshold = get_or(*it, "threshold", c.judge.threshold);
    }
    make_judge(c.judge);
    return c;
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("evolution config: ") + e.what());
  }
}

SamplerParams sampler_params_from(const json& j) {
  try {
    SamplerParams p;
    p.alpha = get_or(j, "alpha", p.alpha);
    p.beta = get_or(j, "beta", p.beta);
    p.gamma = get_or(j, "gamma", p.gamma);
    p.lambda_A = get_or(j, "lambda_A", p.lambda_A);
    p.lambda_L = get_or(j, "lambda_L", p.lambda_L);
    p.lambda_R = get_or(j, "lambda_R", p.lambda_R);
    p.epsilon = get_or(j, "epsilon", p.epsilon);
    p.validate();
    return p;
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("sampler params: ") + e.what());
  }
}

}  // namespace

GraphConfig parse_graph_config(std::string_view text) {
  return graph_config_from(parse_json(text, ErrorKind::Config, "graph config"), 0);
}

RouterConfig parse_router_config(std::string_view text) {
  return router_config_from(parse_json(text, ErrorKind::Config, "router config"));
}

std::shared_ptr<const IntentRouter> make_router(const RouterConfig& c) {
  if (c.type == "table") return std::make_shared<const TableRouter>(c.tasks, c.table);
  if (c.type == "keyword") return std::make_shared<const KeywordRouter>(c.tasks, c.keywords);
  if (c.type == "uniform") return std::make_shared<const UniformRouter>(c.tasks);
  fail(ErrorKind::Config, "unknown router type '" + c.type + "'");
}

CostConfig parse_cost_config(std::string_view text) {
  return cost_config_from(parse_json(text, ErrorKind::Config, "cost config"));
}

std::shared_ptr<const QualityJudge> make_judge(const JudgeConfig& c) {
  if (c.type == "threshold") return std::make_shared<const ThresholdJudge>(c.threshold);
  if (c.type == "accept_all") return std::make_shared<const AcceptAllJudge>();
  if (c.type == "reject_all") return std::make_shared<const RejectAllJudge>();
  fail(ErrorKind::Config, "unknown judge type '" + c.type + "'");
}

EvolutionConfig parse_evolution_config(std::string_view text) {
  return evolution_config_from(parse_json(text, ErrorKind::Config, "evolution config"));
}

SamplerParams parse_sampler_params(std::string_view text) {
  return sampler_params_from(parse_json(text, ErrorKind::Config, "sampler params"));
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir,
                        std::optional<std::uint64_t> seed) {
  json j = parse_json(text, ErrorKind::Config, "scenario");
  if (!j.is_object()) fail(ErrorKind::Config, "scenario must be a JSON object");
  try {
    Scenario s;
    s.seed = seed ? *seed : get_or<std::uint64_t>(j, "seed", 0);

    j["graph_config"] = resolve_ref(require(j, "graph_config"), base_dir);
    s.graph = graph_config_from(j["graph_config"], s.seed);
    const auto graph = build_graph(s.graph);
    const TaskSet& tasks = s.graph.tasks;

    s.theta_soft = get_or(j, "theta_soft", s.theta_soft);
    AgentModel defaults;
    if (auto it = j.find("agent_defaults"); it != j.end()) {
      defaults.base_quality.assign(tasks.size(), 0.0);
      apply_agent_fields(defaults, *it, tasks);
    }
    const bool default_quality = !j.contains("agent_defaults") || !j["agent_defaults"].contains("base_quality");
    s.agents.clear();
    for (std::size_t l = 0; l < graph.num_layers(); ++l) {
      for (std::size_t k = 0; k < graph.width(); ++k) {
        AgentModel a = defaults;
        a.node = {l, k};
        if (default_quality) a.base_quality = graph.profile(a.node).ability;
        s.agents.push_back(std::move(a));
      }
    }
    if (auto it = j.find("agent_models"); it != j.end()) {
      // Whole-layer entries first, then single-node entries.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& e : *it) {
          const bool node_entry = e.contains("slot");
          if (node_entry != (pass == 1)) continue;
          const auto layer = require(e, "layer").get<std::size_t>();
          if (layer >= graph.num_layers()) fail(ErrorKind::Config, "agent model layer out of range");
          for (std::size_t k = 0; k < graph.width(); ++k) {
            if (node_entry && e["slot"].get<std::size_t>() != k) continue;
            apply_agent_fields(s.agents[graph.flat({layer, k})], e, tasks);
          }
          if (node_entry && e["slot"].get<std::size_t>() >= graph.width()) {
            fail(ErrorKind::Config, "agent model slot out of range");
          }
        }
      }
    }
    for (const auto& a : s.agents) a.validate(tasks.size());

    const json wl = j.value("workload", json::object());
    s.workload.mix = wl.contains("mix") ? weight_vector(wl["mix"], tasks, "workload.mix", true)
                                        : WeightVector::uniform(tasks.size());
    s.workload.count = get_or<std::size_t>(wl, "count", 100);
    if (s.workload.count == 0) fail(ErrorKind::Config, "workload count must be >= 1");
    s.workload.mixed_fraction = get_or(wl, "mixed_fraction", 0.0);
    s.workload.unknown_fraction = get_or(wl, "unknown_fraction", 0.0);
    s.workload.seed = get_or<std::uint64_t>(wl, "seed", s.seed);
    if (get_or<std::string>(wl, "arrival", "closed_loop") != "closed_loop") {
      fail(ErrorKind::Config, "only closed_loop arrival is supported");
    }

    s.cost = cost_config_from(j.value("cost_config", json::object()));
    s.sampler = sampler_params_from(j.value("sampler_params", json::object()));
    s.evolution = evolution_config_from(j.value("evolution_config", json::object()));
    if (auto it = j.find("router_config"); it != j.end()) {
      j["router_config"] = resolve_ref(*it, base_dir);
      s.router = router_config_from(j["router_config"]);
      if (!(s.router->tasks == tasks)) fail(ErrorKind::Config, "router tasks differ from graph tasks");
    }

    const json wu = j.value("warmup", json::object());
    s.warmup.iterations = get_or(wu, "iterations", s.warmup.iterations);
    s.warmup.ants_per_iteration = get_or(wu, "ants_per_iteration", s.warmup.ants_per_iteration);
    s.warmup.lambda = get_or(wu, "lambda", s.warmup.lambda);
    s.initial_pheromone = get_or(wu, "initial_pheromone", s.initial_pheromone);
    if (!(s.initial_pheromone > 0.0)) fail(ErrorKind::Config, "initial_pheromone must be positive");

    s.levels = get_or(j, "levels", std::vector<std::size_t>{20, 50, 100, 200, 500, 1000});

    json canonical = j;
    canonical.erase("seed");
    s.config_hash = fnv1a64(canonical.dump());
    return s;
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path, std::optional<std::uint64_t> seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Config, "cannot open scenario file: " + path.string());
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_scenario(text, path.parent_path(), seed);
}

std::shared_ptr<const IntentRouter> scenario_router(const Scenario& s) {
  if (s.router) return make_router(*s.router);
  return std::make_shared<const KeywordRouter>(s.graph.tasks, Vocabulary::defaults(s.graph.tasks).known);
}

// ---------------------------------------------------------------------------

std::string snapshot_to_json(const SpecialistSet& set, const ArtifactMeta& meta) {
  if (set.specialists.empty()) fail(ErrorKind::State, "empty specialist set");
  const auto& first = set.specialists.front().tau;
  json j;
  j["meta"] = meta_json(meta);
  j["num_layers"] = first.num_layers();
  j["width"] = first.width();
  j["sequence"] = set.sequence;
  j["tasks"] = set.tasks.names();
  json specs = json::object();
  for (const auto& s : set.specialists) {
    json edges = json::array();
    for (std::size_t l = 0; l + 1 < s.tau.num_layers(); ++l) {
      for (std::size_t i = 0; i < s.tau.width(); ++i) {
        for (std::size_t k = 0; k < s.tau.width(); ++k) edges.push_back(json::array({l, i, k, s.tau.edge(l, i, k)}));
      }
    }
    auto src = s.tau.source_row();
    specs[s.task] = {{"virtual_source", std::vector<double>(src.begin(), src.end())}, {"edges", std::move(edges)}};
  }
  j["specialists"] = std::move(specs);
  return j.dump(1) + "\n";
}

Snapshot snapshot_from_json(std::string_view text) {
  const json j = parse_json(text, ErrorKind::Data, "snapshot");
  try {
    Snapshot out;
    out.meta = meta_from_json(j.at("meta"));
    const auto layers = j.at("num_layers").get<std::size_t>();
    const auto width = j.at("width").get<std::size_t>();
    if (layers < 2 || width == 0) fail(ErrorKind::Data, "snapshot has an invalid shape");
    out.specialists.tasks = TaskSet(j.at("tasks").get<std::vector<std::string>>());
    out.specialists.sequence = j.at("sequence").get<std::uint64_t>();
    const auto& specs = j.at("specialists");
    if (specs.size() != out.specialists.tasks.size()) fail(ErrorKind::Data, "snapshot specialist count mismatch");
    for (const auto& task : out.specialists.tasks.names()) {
      const auto& s = specs.at(task);
      PheromoneSpecialist sp{task, PheromoneMatrix(layers, width, 1.0)};
      const auto src = s.at("virtual_source").get<std::vector<double>>();
      if (src.size() != width) fail(ErrorKind::Data, "snapshot virtual_source has the wrong width");
      std::copy(src.begin(), src.end(), sp.tau.source_row().begin());
      std::vector<bool> seen((layers - 1) * width * width, false);
      for (const auto& e : s.at("edges")) {
        if (!e.is_array() || e.size() != 4) fail(ErrorKind::Data, "snapshot edge must be [layer, from, to, value]");
        const auto l = e[0].get<std::size_t>();
        const auto a = e[1].get<std::size_t>();
        const auto b = e[2].get<std::size_t>();
        if (l + 1 >= layers || a >= width || b >= width) fail(ErrorKind::Data, "snapshot edge out of range");
        const std::size_t idx = (l * width + a) * width + b;
        if (seen[idx]) fail(ErrorKind::Data, "duplicate snapshot edge");
        seen[idx] = true;
        sp.tau.edge(l, a, b) = e[3].get<double>();
      }
      if (std::find(seen.begin(), seen.end(), false) != seen.end()) fail(ErrorKind::Data, "snapshot is missing edges");
      for (double v : sp.tau.values()) {
        if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::Data, "snapshot pheromone must be positive and finite");
      }
      out.specialists.specialists.push_back(std::move(sp));
    }
    return out;
  } catch (const json::exception& e) {
    fail(ErrorKind::Data, std::string("snapshot: ") + e.what());
  }
}

void save_snapshot(const std::filesystem::path& path, const SpecialistSet& set, const ArtifactMeta& meta) {
  write_file(path, snapshot_to_json(set, meta));
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Config, "cannot open snapshot file: " + path.string());
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return snapshot_from_json(text);
}

// ---------------------------------------------------------------------------

double row_entropy(std::span<const double> row) {
  double total = 0.0;
  for (double v : row) {
    if (v < 0.0) fail(ErrorKind::Data, "negative entry in entropy row");
    total += v;
  }
  if (!(total > 0.0)) fail(ErrorKind::Data, "entropy of an all-zero row");
  double h = 0.0;
  for (double v : row) {
    if (v > 0.0) {
      const double p = v / total;
      h -= p * std::log(p);
    }
  }
  return h;
}

std::vector<EntropyRow> entropy_summary(const SpecialistSet& set) {
  std::vector<EntropyRow> rows;
  for (const auto& s : set.specialists) {
    rows.push_back({s.task, "source", row_entropy(s.tau.source_row())});
    for (std::size_t l = 0; l + 1 < s.tau.num_layers(); ++l) {
      for (std::size_t i = 0; i < s.tau.width(); ++i) rows.push_back({s.task, node_label(l, i), row_entropy(s.tau.row(l, i))});
    }
  }
  return rows;
}

std::string heatmap_csv(const PheromoneMatrix& tau, const ArtifactMeta& meta) {
  std::string out = csv_header_comment(meta);
  out += "from";
  for (std::size_t k = 0; k < tau.width(); ++k) out += ",to" + std::to_string(k);
  out += "\n";
  auto emit = [&](const std::string& label, std::span<const double> row) {
    out += label;
    for (double v : row) out += "," + format_double(v);
    out += "\n";
  };
  emit("source", tau.source_row());
  for (std::size_t l = 0; l + 1 < tau.num_layers(); ++l) {
    for (std::size_t i = 0; i < tau.width(); ++i) emit(node_label(l, i), tau.row(l, i));
  }
  return out;
}

std::string entropy_csv(const std::vector<EntropyRow>& rows, std::size_t width, const ArtifactMeta& meta) {
  const double max_h = std::log(static_cast<double>(width));
  std::string out = csv_header_comment(meta);
  out += "task,from,entropy,max_entropy,ratio\n";
  for (const auto& r : rows) {
    const double ratio = max_h > 0.0 ? r.entropy / max_h : 0.0;
    out += r.task + "," + r.from + "," + format_double(r.entropy) + "," + format_double(max_h) + "," +
           format_double(ratio) + "\n";
  }
  return out;
}

std::string warmup_csv(const WarmupReport& report, const TaskSet& tasks, const ArtifactMeta& meta) {
  std::string out = csv_header_comment(meta);
  out += "iteration,task,mean_fitness,modal_path_prob\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.iteration) + "," + tasks[r.task] + "," + format_double(r.mean_fitness) + "," +
           format_double(r.modal_path_prob) + "\n";
  }
  return out;
}

std::string stress_long_csv(const StressReport& report, const ArtifactMeta& meta) {
  std::string out = csv_header_comment(meta);
  out += "system,level,workers,time_s,speedup,accuracy,mean_quality,mean_cost,queries,conservation_violations\n";
  for (const auto& sys : report.systems) {
    for (std::size_t i = 0; i < sys.levels.size(); ++i) {
      const auto& l = sys.levels[i];
      out += sys.system + "," + std::to_string(i) + "," + std::to_string(l.workers) + "," + format_double(l.wall_time) +
             "," + format_double(l.speedup) + "," + format_double(l.accuracy) + "," + format_double(l.mean_quality) +
             "," + format_double(l.mean_cost) + "," + std::to_string(l.queries) + "," +
             std::to_string(l.conservation_violations) + "\n";
    }
  }
  return out;
}

std::string stress_table_csv(const StressReport& report, const ArtifactMeta& meta) {
  if (report.systems.size() < 2) fail(ErrorKind::Internal, "stress table needs two systems");
  const auto& ours = report.systems[0];
  const auto& base = report.systems[1];
  if (ours.levels.size() != base.levels.size()) fail(ErrorKind::Internal, "stress systems ran different levels");
  std::string out = csv_header_comment(meta);
  out += "level,time_s,speedup,accuracy_ours,accuracy_wrr\n";
  for (std::size_t i = 0; i < ours.levels.size(); ++i) {
    const auto& a = ours.levels[i];
    out += std::to_string(a.workers) + "," + format_double(a.wall_time) + "," + format_double(a.speedup) + "," +
           format_double(a.accuracy) + "," + format_double(base.levels[i].accuracy) + "\n";
  }
  return out;
}

std::vector<RouterSample> parse_router_dataset(std::string_view text, const TaskSet& tasks) {
  std::vector<RouterSample> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    const json j = parse_json(line, ErrorKind::Data, "dataset line " + std::to_string(line_no));
    try {
      const json& target = j.contains("target") ? j.at("target") : j.at("weights");
      out.push_back({j.at("query").get<std::string>(), weight_vector(target, tasks, "target")});
    } catch (const json::exception& e) {
      fail(ErrorKind::Data, "dataset line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      fail(ErrorKind::Data, "dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    if (end == text.size()) break;
  }
  if (out.empty()) fail(ErrorKind::Data, "empty dataset");
  return out;
}

std::string router_eval_json(const RouterEvaluation& e, const TaskSet& tasks, const ArtifactMeta& meta) {
  json j;
  j["meta"] = meta_json(meta);
  j["samples"] = e.samples;
  j["mean_kl"] = number_or_null(e.mean_kl);
  j["top1_accuracy"] = e.top1_accuracy;
  j["infinite_divergence"] = e.infinite_divergence;
  json per = json::object();
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    per[tasks[t]] = {{"accuracy", number_or_null(e.per_task_accuracy[t])}, {"count", e.per_task_count[t]}};
  }
  j["per_task"] = std::move(per);
  return j.dump(1) + "\n";
}

std::string route_log_jsonl(const ServeSummary& summary, const TaskSet& tasks, const ArtifactMeta& meta) {
  std::string out = json{{"meta", meta_json(meta)}, {"tasks", tasks.names()}}.dump() + "\n";
  for (const auto& s : summary.served) {
    json j;
    j["index"] = s.index;
    j["query"] = s.query;
    j["w"] = std::vector<double>(s.decision.w.values().begin(), s.decision.w.values().end());
    j["low_confidence"] = s.decision.low_confidence;
    j["path"] = s.decision.path.slots;
    j["snapshot_sequence"] = s.decision.snapshot_sequence;
    j["quality"] = s.quality;
    j["cost"] = {{"tokens", s.cost.tokens},
                 {"latency", s.cost.latency},
                 {"load_agg", s.cost.load_agg},
                 {"weighted_total", s.cost.weighted_total}};
    j["utility"] = s.utility;
    out += j.dump() + "\n";
  }
  return out;
}

std::string serve_summary_json(const ServeSummary& summary, const EvolverStats* stats, const ArtifactMeta& meta) {
  json j;
  j["meta"] = meta_json(meta);
  j["served"] = summary.served.size();
  j["mean_quality"] = summary.mean_quality;
  j["mean_cost"] = summary.mean_cost;
  j["mean_utility"] = summary.mean_utility;
  if (stats) {
    j["evolution"] = {{"observed", stats->observed}, {"admitted", stats->admitted}, {"batches", stats->batches},
                      {"published", stats->published}, {"accepted", stats->accepted}, {"rejected", stats->rejected},
                      {"incidents", stats->incidents}};
  }
  return j.dump(1) + "\n";
}

std::string run_meta_json(const ArtifactMeta& meta, std::string_view command, std::string_view timestamp) {
  json j = meta_json(meta);
  j["command"] = std::string(command);
  j["timestamp"] = std::string(timestamp);
  return j.dump(1) + "\n";
}

}  // namespace amro
