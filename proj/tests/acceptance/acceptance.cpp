// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "amro/error.hpp"
#include "amro/evolution.hpp"
#include "amro/experiment.hpp"
#include "amro/heuristic.hpp"
#include "amro/io.hpp"
#include "amro/pheromone.hpp"
#include "amro/router.hpp"
#include "amro/sampler.hpp"
#include "amro/sim.hpp"
#include "fixtures.hpp"

namespace {

using namespace amro;
namespace fx = amro::fixtures;

constexpr double kExactTol = 1e-12;
constexpr double kChiSquareMinP = 0.01;
constexpr std::size_t kChiSquareDraws = 100'000;
constexpr double kModalProbMin = 0.9;
constexpr std::size_t kConvergenceIterations = 500;
constexpr std::size_t kWarmupIterations = 3000;
constexpr std::size_t kWarmupAnts = 64;
constexpr double kWarmupRho = 0.05;
constexpr double kConcentratingAlpha = 1.5;
constexpr std::size_t kOracleScenarios = 20;
constexpr double kOracleMatchMin = 0.9;
constexpr double kIsolationModalMin = 0.95;
constexpr std::size_t kIsolationDraws = 10'000;
constexpr std::size_t kGateRecords = 1000;
constexpr double kSpeedupMin = 3.0;
constexpr double kOursSpreadMax = 0.01;
constexpr double kWrrDropMin = 0.05;
constexpr double kEntropyRatioMax = 0.5;
constexpr double kKeywordTop1Min = 0.9;
constexpr std::size_t kRouterSamples = 300;

WarmupConfig warmup_config() {
  WarmupConfig cfg;
  cfg.iterations = kWarmupIterations;
  cfg.ants_per_iteration = kWarmupAnts;
  return cfg;
}

EvolutionParams warmup_evolution() {
  EvolutionParams ep;
  ep.rho = kWarmupRho;
  return ep;
}

// Criteria on path concentration: sharper pheromone exponent, heuristic kept.
SamplerParams concentrating_sampler() {
  SamplerParams sp;
  sp.alpha = kConcentratingAlpha;
  return sp;
}

// Oracle matching: pheromone only, so the learned ranking is not biased by ability.
SamplerParams oracle_sampler() {
  SamplerParams sp;
  sp.beta = 0.0;
  return sp;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome equation_exactness() {
  struct Check {
    std::string name;
    double got;
    double want;
  };
  std::vector<Check> checks;

  {  // pheromone fusion
    PheromoneMatrix math(2, 2, 1.0), code(2, 2, 1.0);
    const double m[2][2] = {{2, 0.01}, {0.01, 2}};
    const double c[2][2] = {{0.01, 4}, {4, 0.01}};
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        math.edge(0, i, j) = m[i][j];
        code.edge(0, i, j) = c[i][j];
      }
    }
    std::vector<PheromoneSpecialist> s{{"math", math}, {"code", code}};
    const auto f = fuse_pheromone(s, WeightVector({0.5, 0.5}));
    const double want[2][2] = {{1.005, 2.005}, {2.005, 1.005}};
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) checks.push_back({fmt("fuse[%zu][%zu]", i, j), f.edge(0, i, j), want[i][j]});
    }
  }
  {  // task-aware heuristic: ability norm 0.6 + load norm 0.4
    SamplerParams p;
    p.lambda_A = 1.0;
    p.lambda_L = 1.0;
    p.lambda_R = 0.0;
    p.epsilon = 0.0009765625;
    NormBounds b;
    b.lo = {0.0, 0.0, 0.0};
    b.hi = {1.0, 2.5, 1.0};
    NodeProfile prof{{0, 0}, "", "", {0.6}};
    NodeTelemetry tel{true, 1.0 - p.epsilon, 0.0};
    checks.push_back({"heuristic", node_heuristic(prof, tel, 0, p, b), 1.0});
  }
  checks.push_back({"fuse_heuristic", fuse_heuristic({{0.2}, {0.8}}, WeightVector({0.25, 0.75}))[0], 0.65});
  {  // transition rule
    const std::vector<std::size_t> a2{0, 1}, a3{0, 1, 2};
    auto p = transition_probs(std::vector<double>{1, 3}, std::vector<double>{5, 7}, a2, 1.0, 0.0).p;
    checks.push_back({"transition a=1 b=0 [0]", p[0], 0.25});
    checks.push_back({"transition a=1 b=0 [1]", p[1], 0.75});
    p = transition_probs(std::vector<double>{9, 1, 4}, std::vector<double>{2, 2, 4}, a3, 0.0, 1.0).p;
    checks.push_back({"transition a=0 b=1 [0]", p[0], 0.25});
    checks.push_back({"transition a=0 b=1 [2]", p[2], 0.5});
    p = transition_probs(std::vector<double>{1, 1, 1}, std::vector<double>{1, 1, 1}, a3, 1.0, 1.0).p;
    checks.push_back({"transition uniform", p[1], 1.0 / 3.0});
  }
  {  // exploration safeguard: 0.2/2 + 0.8 * p
    const std::vector<std::size_t> a{0, 1};
    auto m = exploration_mix(std::vector<double>{0.25, 0.75}, a, 0.2);
    checks.push_back({"exploration [0]", m[0], 0.3});
    checks.push_back({"exploration [1]", m[1], 0.7});
  }
  {  // offline fitness and update
    checks.push_back({"offline_fitness R=0 C=1", offline_fitness(0.0, 1.0, 1.0), 2.01});
    checks.push_back({"offline_fitness R=1 C=0", offline_fitness(1.0, 0.0, 5.0), 0.01});
    PheromoneMatrix tau(3, 2, 1.0);
    EvolutionParams ep;
    ep.rho = 0.1;
    ep.Q = 1.0;
    ep.epsilon = 0.0;
    offline_update(tau, RoutePath{{0, 1, 0}}, 1.0, ep);
    checks.push_back({"offline on-path", tau.edge(0, 0, 1), 1.9});
    checks.push_back({"offline source on-path", tau.source_row()[0], 1.9});
    checks.push_back({"offline off-path", tau.edge(0, 1, 1), 0.9});
  }
  {  // online update with f_sys = 1
    CostWeights cw{1.0, 0.0, 0.0, 1.0, LoadStat::Max};
    RouteTrace tr;
    tr.stages.push_back({{0, 0}, 0, 0, 0.0, 0.0});
    tr.stages.push_back({{1, 1}, 0, 0, 0.0, 0.0});
    checks.push_back({"system_fitness all-zero", system_fitness(tr, {0, 0, 0, 1.0, LoadStat::Max}), 0.01});
    RouteTrace tok;
    tok.stages.push_back({{0, 0}, 100, 50, 0.0, 0.0});
    tok.stages.push_back({{1, 0}, 200, 150, 0.0, 0.0});
    checks.push_back({"system_fitness tokens", system_fitness(tok, cw), 500.01});
    checks.push_back({"path_cost tokens", path_cost(tok, cw).weighted_total, 500.0});

    SpecialistSet set;
    set.tasks = TaskSet({"math", "code"});
    set.specialists = {{"math", PheromoneMatrix(2, 2, 1.0)}, {"code", PheromoneMatrix(2, 2, 1.0)}};
    CostWeights unit{0.0, 0.99, 0.0, 1.0, LoadStat::Max};
    RouteTrace lat = tr;
    lat.wall_time = 1.0;
    const double fsys = system_fitness(lat, unit);
    checks.push_back({"system_fitness unit", fsys, 1.0});
    EvolutionParams ep;
    ep.rho = 0.1;
    ep.Q = 1.0;
    ep.epsilon = 0.0;
    ServingRecord rec{"q", WeightVector::one_hot(2, 0), RoutePath{{0, 1}}, "", lat, 1.0};
    online_update(set, std::span(&rec, 1), unit, ep);
    checks.push_back({"online math on-path", set.specialists[0].tau.edge(0, 0, 1), 1.9});
    checks.push_back({"online code on-path", set.specialists[1].tau.edge(0, 0, 1), 0.9});
    checks.push_back({"online math off-path", set.specialists[0].tau.edge(0, 1, 1), 1.0});
  }
  checks.push_back({"utility", utility(0.9, CostBreakdown{0, 0, 0, 0.4}, 1.0), 0.5});
  checks.push_back({"kl", kl_divergence(WeightVector({1.0, 0.0}), WeightVector({0.5, 0.5})), std::log(2.0)});

  double worst = 0.0;
  std::string worst_name;
  for (const auto& c : checks) {
    const double err = std::abs(c.got - c.want);
    if (err >= worst) {
      worst = err;
      worst_name = c.name;
    }
    if (!(err <= kExactTol)) return {false, fmt("%s: got %.17g want %.17g", c.name.c_str(), c.got, c.want)};
  }
  return {true, fmt("%zu checks, max |err| %.3g (%s)", checks.size(), worst, worst_name.c_str())};
}

// ---------------------------------------------------------------------------

double chi_square_p(const std::vector<double>& probs, const std::vector<std::size_t>& counts, std::size_t n) {
  double stat = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    const double e = probs[i] * static_cast<double>(n);
    stat += (static_cast<double>(counts[i]) - e) * (static_cast<double>(counts[i]) - e) / e;
    ++cells;
  }
  boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

Outcome probability_law() {
  Rng rng(20240611);
  std::string detail;
  bool pass = true;
  auto run = [&](const char* label, const std::vector<double>& probs, const std::vector<std::size_t>& allowed,
                 double gamma, const std::vector<double>& expected) {
    std::vector<std::size_t> counts(probs.size(), 0);
    for (std::size_t i = 0; i < kChiSquareDraws; ++i) ++counts[sample_next(probs, allowed, gamma, rng)];
    const double p = chi_square_p(expected, counts, kChiSquareDraws);
    pass = pass && p > kChiSquareMinP;
    detail += fmt("%s p=%.3f; ", label, p);
  };
  run("gamma=0 (0.25,0.75)", {0.25, 0.75}, {0, 1}, 0.0, {0.25, 0.75});
  run("gamma=0 (0.1,0.2,0.3,0.4)", {0.1, 0.2, 0.3, 0.4}, {0, 1, 2, 3}, 0.0, {0.1, 0.2, 0.3, 0.4});
  run("gamma=1 uniform/4", {0.7, 0.1, 0.1, 0.1}, {0, 1, 2, 3}, 1.0, {0.25, 0.25, 0.25, 0.25});
  run("gamma=1 uniform/3 of 5", {0.0, 0.5, 0.0, 0.25, 0.25}, {1, 3, 4}, 1.0, {0, 1.0 / 3, 0, 1.0 / 3, 1.0 / 3});
  return {pass, detail};
}

// ---------------------------------------------------------------------------

Outcome warmup_convergence() {
  const auto f = fx::dominant();
  const auto best = brute_force_best_path(f.graph, *f.pool, WeightVector::one_hot(1, 0), f.cost);
  if (best.path != fx::kDominantPath) return {false, "fixture optimum is not the dominant path"};

  const SamplerParams sp = concentrating_sampler();
  WarmupConfig cfg = warmup_config();
  cfg.iterations = kConvergenceIterations;
  const auto w = fx::warm(f, cfg, warmup_evolution(), sp, 7);
  const auto last = w.report.final_row(0);
  std::size_t first_hit = 0;
  for (const auto& r : w.report.rows) {
    if (r.modal_path_prob >= kModalProbMin && r.modal_path == fx::kDominantPath) {
      first_hit = r.iteration + 1;
      break;
    }
  }
  const PathSampler s(f.graph, w.specialists, WeightVector::one_hot(1, 0), sp, idle_bounds(f.graph, sp));
  const double with_gamma = s.probability(fx::kDominantPath, sp.gamma);
  const bool pass = last && last->iteration + 1 <= kConvergenceIterations && last->modal_path == fx::kDominantPath &&
                    last->modal_path_prob >= kModalProbMin;
  return {pass, fmt("modal %s p=%.4f after %zu iterations (exploitation law), first >= %.2f at iteration %zu; p with gamma=%.1f: %.4f",
                    last ? to_string(last->modal_path).c_str() : "-", last ? last->modal_path_prob : 0.0,
                    kConvergenceIterations, kModalProbMin, first_hit, sp.gamma, with_gamma)};
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  std::size_t matches = 0;
  std::string misses;
  for (std::size_t i = 0; i < kOracleScenarios; ++i) {
    const auto f = fx::random(1000 + i);
    if (f.graph.num_paths() > 64) return {false, "scenario exceeds 64 paths"};
    const SamplerParams sp = oracle_sampler();
    const auto w = fx::warm(f, warmup_config(), warmup_evolution(), sp, 100 + i);
    const auto best = brute_force_best_path(f.graph, *f.pool, WeightVector::one_hot(1, 0), fx::oracle_weights(f, w, 0));
    const PathSampler s(f.graph, w.specialists, WeightVector::one_hot(1, 0), sp, idle_bounds(f.graph, sp));
    if (s.greedy() == best.path) {
      ++matches;
    } else {
      misses += fmt(" seed %zu: greedy %s vs %s;", 1000 + i, to_string(s.greedy()).c_str(), to_string(best.path).c_str());
    }
  }
  const double rate = static_cast<double>(matches) / kOracleScenarios;
  return {rate >= kOracleMatchMin, fmt("%zu/%zu greedy paths match the brute-force optimum%s", matches,
                                       kOracleScenarios, misses.c_str())};
}

// ---------------------------------------------------------------------------

Outcome task_isolation() {
  const auto f = fx::two_task();
  Rng rng(31);
  Rng calib = rng.fork(1);
  auto outcomes = simulated_outcomes(f.graph, f.pool, f.cost, calib);
  const SamplerParams sp = concentrating_sampler();
  const auto bounds = idle_bounds(f.graph, sp);
  SpecialistSet set = SpecialistSet::uniform(f.graph, 1.0);
  const SpecialistSet initial = set;

  WarmupConfig cfg = warmup_config();
  cfg.tasks = {0};
  warmup(f.graph, set, outcomes.sources, cfg, warmup_evolution(), sp, bounds, rng);
  const bool code_untouched = set.specialists[1] == initial.specialists[1];
  const SpecialistSet after_math = set;
  cfg.tasks = {1};
  warmup(f.graph, set, outcomes.sources, cfg, warmup_evolution(), sp, bounds, rng);
  const bool math_untouched = set.specialists[0] == after_math.specialists[0];

  std::string detail = fmt("other specialist bitwise unchanged: math-training %s, code-training %s;",
                           code_untouched ? "yes" : "NO", math_untouched ? "yes" : "NO");
  bool pass = code_untouched && math_untouched;
  SamplerParams exploit = sp;
  exploit.gamma = 0.0;
  for (std::size_t t = 0; t < 2; ++t) {
    const auto w = WeightVector::one_hot(2, t);
    CostWeights oc = f.cost;
    oc.lambda = 1.0 / outcomes.cost_scale[t];
    const auto best = brute_force_best_path(f.graph, *f.pool, w, oc);
    const PathSampler s(f.graph, set, w, exploit, bounds);
    std::map<RoutePath, std::size_t> freq;
    Rng draw(500 + t);
    for (std::size_t i = 0; i < kIsolationDraws; ++i) ++freq[s.sample(draw)];
    auto modal = std::max_element(freq.begin(), freq.end(), [](auto& a, auto& b) { return a.second < b.second; });
    const double share = static_cast<double>(modal->second) / kIsolationDraws;
    pass = pass && modal->first == best.path && share >= kIsolationModalMin;
    detail += fmt(" %s modal %s (optimum %s) freq %.4f;", f.graph.tasks()[t].c_str(), to_string(modal->first).c_str(),
                  to_string(best.path).c_str(), share);
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------

double path_mass(const SpecialistSet& s, std::size_t task, const std::vector<RoutePath>& paths) {
  PheromoneMatrix tau = s.specialists[task].tau;
  std::vector<bool> on(tau.values().size(), false);
  double* base = tau.values().data();
  for (const auto& p : paths) tau.for_each_path_edge(p, [&](double& e) { on[static_cast<std::size_t>(&e - base)] = true; });
  double m = 0.0;
  for (std::size_t i = 0; i < on.size(); ++i) {
    if (on[i]) m += tau.values()[i];
  }
  return m;
}

Outcome gate_safety() {
  const auto f = fx::two_task();
  const SpecialistSet initial = SpecialistSet::uniform(f.graph, 1.0);
  const std::vector<RoutePath> paths{fx::kMathPath, fx::kCodePath, RoutePath{{1, 1, 1}}};
  const WeightVector mix({0.7, 0.3});
  CostWeights cw{1e-4, 0.0, 0.0, 1.0, LoadStat::Max};

  auto run = [&](std::shared_ptr<const QualityJudge> judge, EvolverStats& stats) {
    SnapshotStore store(initial);
    EvolverConfig ec;
    ec.sampling_rate = 1.0;
    ec.batch_size = 32;
    ec.cost = cw;
    {
      OnlineEvolver ev(store, std::move(judge), ec);
      Rng rng(99);
      for (std::size_t i = 0; i < kGateRecords; ++i) {
        const auto& p = paths[i % paths.size()];
        const auto ex = execute_path(*f.pool, p, mix, rng);
        ev.observe({"q" + std::to_string(i), mix, p, "", ex.trace, ex.quality}, rng);
      }
      ev.flush();
      stats = ev.stats();
    }
    return *store.load();
  };

  EvolverStats rej_stats, acc_stats;
  const SpecialistSet rejected = run(std::make_shared<const RejectAllJudge>(), rej_stats);
  const SpecialistSet accepted = run(std::make_shared<const AcceptAllJudge>(), acc_stats);
  const bool unchanged = rejected == initial && rej_stats.published == 0;
  bool increased = true;
  std::string masses;
  for (std::size_t t = 0; t < 2; ++t) {
    const double before = path_mass(initial, t, paths);
    const double after = path_mass(accepted, t, paths);
    increased = increased && after > before;
    masses += fmt(" %s on-path mass %.4g -> %.4g;", f.graph.tasks()[t].c_str(), before, after);
  }
  return {unchanged && increased && acc_stats.published > 0,
          fmt("reject-all: %llu batches, %llu published, bitwise unchanged %s; accept-all: %llu published;%s",
              static_cast<unsigned long long>(rej_stats.batches), static_cast<unsigned long long>(rej_stats.published),
              unchanged ? "yes" : "NO", static_cast<unsigned long long>(acc_stats.published), masses.c_str())};
}

// ---------------------------------------------------------------------------

Outcome stress_trend() {
  const auto scenario = load_scenario(std::string(AMRO_SCENARIO_DIR) + "/stress.json");
  const auto d = make_deployment(scenario);
  const auto warmed = run_warmup(scenario, d, scenario.warmup.iterations, scenario.seed);
  const std::vector<std::size_t> levels{4, 8, 16, 32, 64};
  const auto report = run_stress(scenario, d, warmed.specialists, levels, scenario.seed);
  const auto& ours = report.systems[0].levels;
  const auto& wrr = report.systems[1].levels;

  auto [lo, hi] = std::minmax_element(ours.begin(), ours.end(), [](auto& a, auto& b) { return a.accuracy < b.accuracy; });
  const double spread = hi->accuracy - lo->accuracy;
  const double drop = wrr.front().accuracy - wrr.back().accuracy;
  const double speedup = ours.back().speedup;
  std::uint64_t violations = 0;
  for (const auto& s : report.systems) {
    for (const auto& l : s.levels) violations += l.conservation_violations;
  }
  std::string table;
  for (std::size_t i = 0; i < ours.size(); ++i) {
    table += fmt(" [%zu: %.1fs x%.2f ours %.2f%% wrr %.2f%%]", ours[i].workers, ours[i].wall_time, ours[i].speedup,
                 100 * ours[i].accuracy, 100 * wrr[i].accuracy);
  }
  const bool pass = speedup >= kSpeedupMin && spread <= kOursSpreadMax && drop >= kWrrDropMin && violations == 0;
  return {pass, fmt("speedup %.2f, ours spread %.2f pts, wrr drop %.2f pts, load violations %llu;", speedup,
                    100 * spread, 100 * drop, static_cast<unsigned long long>(violations)) +
                    table};
}

// ---------------------------------------------------------------------------

Outcome heatmap_proxy() {
  const auto f = fx::two_task();
  const auto w = fx::warm(f, warmup_config(), warmup_evolution(), concentrating_sampler(), 41);
  const double limit = kEntropyRatioMax * std::log(static_cast<double>(f.graph.width()));
  double worst = 0.0;
  std::string worst_row;
  for (const auto& r : entropy_summary(w.specialists)) {
    if (r.entropy > worst) {
      worst = r.entropy;
      worst_row = r.task + "/" + r.from;
    }
  }
  // Largest edge of each layer block (source row counts as block -1).
  auto block_argmax = [&](const PheromoneMatrix& tau, int block) {
    std::pair<std::size_t, std::size_t> arg{0, 0};
    double best = -1.0;
    if (block < 0) {
      for (std::size_t j = 0; j < tau.width(); ++j) {
        if (tau.source_row()[j] > best) best = tau.source_row()[j], arg = {0, j};
      }
      return arg;
    }
    for (std::size_t i = 0; i < tau.width(); ++i) {
      for (std::size_t j = 0; j < tau.width(); ++j) {
        if (tau.edge(block, i, j) > best) best = tau.edge(block, i, j), arg = {i, j};
      }
    }
    return arg;
  };
  std::size_t differing = 0;
  for (int b = -1; b + 1 < static_cast<int>(f.graph.num_layers()); ++b) {
    if (block_argmax(w.specialists.specialists[0].tau, b) != block_argmax(w.specialists.specialists[1].tau, b)) {
      ++differing;
    }
  }
  return {worst < limit && differing >= 1,
          fmt("max row entropy %.4f (%s) vs limit %.4f; argmax edge differs on %zu of %zu layers", worst,
              worst_row.c_str(), limit, differing, f.graph.num_layers())};
}

// ---------------------------------------------------------------------------

Outcome router_evaluation() {
  const TaskSet tasks({"math", "code", "general"});
  std::map<std::string, WeightVector, std::less<>> table{
      {"solve 3x+1=10", WeightVector({1.0, 0.0, 0.0})},
      {"write a python function that reverses a list", WeightVector({0.0, 1.0, 0.0})},
      {"what is the capital of peru", WeightVector({0.0, 0.0, 1.0})},
      {"prove the loop invariant of this sort", WeightVector({0.5, 0.5, 0.0})},
      {"summarize the history of calculus", WeightVector({0.3, 0.0, 0.7})},
  };
  const TableRouter tr(tasks, table);
  std::vector<RouterSample> own;
  for (const auto& [q, w] : table) own.push_back({q, w});
  const auto te = evaluate_router(tr, own);

  const auto vocab = Vocabulary::defaults(tasks);
  const KeywordRouter kr(tasks, vocab.known);
  WorkloadSpec spec{WeightVector::uniform(3), kRouterSamples, 0.2, 0.05, 2024};
  std::vector<RouterSample> synth;
  for (const auto& q : generate_workload(spec, tasks, vocab)) synth.push_back({q.text, q.intent});
  const auto ke = evaluate_router(kr, synth);

  const bool pass = te.top1_accuracy == 1.0 && te.mean_kl == 0.0 && ke.top1_accuracy >= kKeywordTop1Min &&
                    ke.samples == kRouterSamples;
  return {pass, fmt("table: top1 %.3f mean_kl %.3g; keyword: top1 %.4f over %zu samples (mean_kl %.4f)",
                    te.top1_accuracy, te.mean_kl, ke.top1_accuracy, ke.samples, ke.mean_kl)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "equation-exactness", 1.0, equation_exactness},
      {2, "probability-law", 5.0, probability_law},
      {3, "warmup-convergence", 10.0, warmup_convergence},
      {4, "oracle-equivalence", 60.0, oracle_equivalence},
      {5, "task-isolation", 30.0, task_isolation},
      {6, "gate-safety", 10.0, gate_safety},
      {7, "stress-trend", 300.0, stress_trend},
      {8, "heatmap-entropy", 10.0, heatmap_proxy},
      {9, "router-evaluation", 5.0, router_evaluation},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs < c.budget_s;
    const bool pass = o.pass && in_budget;
    if (!pass) ++failed;
    std::printf("%s %d %s (%.2fs, budget %.0fs%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                in_budget ? "" : ", OVER BUDGET", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
