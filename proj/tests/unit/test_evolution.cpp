#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include "amro/error.hpp"
#include "amro/evolution.hpp"
#include "amro/experiment.hpp"
#include "amro/sim.hpp"
#include "fixtures.hpp"

namespace amro {
namespace {

namespace fx = amro::fixtures;

RouteTrace trace_of(const RoutePath& path, std::uint64_t tokens, double wall) {
  RouteTrace t;
  for (std::size_t l = 0; l < path.size(); ++l) t.stages.push_back({path.node(l), 0, tokens, wall / path.size(), 0.0});
  t.wall_time = wall;
  return t;
}

ServingRecord record(const WeightVector& w, const RoutePath& path, double quality, double wall = 1.0) {
  return {"q", w, path, "", trace_of(path, 10, wall), quality};
}

bool on_path(const RoutePath& path, std::size_t layer, std::size_t from, std::size_t to) {
  return path.slots[layer] == from && path.slots[layer + 1] == to;
}

// ---------------------------------------------------------------------------

TEST(OfflineFitness, Examples) {
  EXPECT_DOUBLE_EQ(offline_fitness(1.0, 0.0, 7.0), 0.01);
  EXPECT_DOUBLE_EQ(offline_fitness(0.0, 1.0, 1.0), 2.01);
  EXPECT_LT(offline_fitness(1.0, 0.3, 1.0), offline_fitness(0.0, 0.3, 1.0));
}

TEST(OfflineUpdate, OnAndOffPath) {
  PheromoneMatrix tau(3, 3, 1.0);
  const RoutePath path{{1, 2, 0}};
  EvolutionParams p;
  p.rho = 0.1;
  p.Q = 1.0;
  p.epsilon = 0.0;
  offline_update(tau, path, 1.0, p);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(tau.source_row()[j], j == 1 ? 1.9 : 0.9, 1e-12);
  for (std::size_t l = 0; l < 2; ++l) {
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) EXPECT_NEAR(tau.edge(l, a, b), on_path(path, l, a, b) ? 1.9 : 0.9, 1e-12);
    }
  }
}

TEST(OfflineUpdate, HugeFitnessIsPureEvaporation) {
  PheromoneMatrix tau(2, 2, 1.0);
  EvolutionParams p;
  offline_update(tau, RoutePath{{0, 1}}, 1e9, p);
  EXPECT_LT(tau.edge(0, 0, 1) - 0.9, 1e-8);
  EXPECT_NEAR(tau.edge(0, 1, 1), 0.9, 1e-15);
}

TEST(OfflineUpdate, NoEvaporation) {
  PheromoneMatrix tau(2, 2, 1.0);
  EvolutionParams p;
  p.rho = 0.0;
  p.epsilon = 0.0;
  offline_update(tau, RoutePath{{0, 1}}, 0.5, p);
  EXPECT_DOUBLE_EQ(tau.edge(0, 0, 1), 3.0);
  EXPECT_DOUBLE_EQ(tau.edge(0, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(tau.source_row()[1], 1.0);
}

TEST(OfflineUpdate, ColonyWithOneAntMatchesSinglePath) {
  PheromoneMatrix a(3, 3, 1.0), b(3, 3, 1.0);
  EvolutionParams p;
  const RoutePath path{{2, 2, 1}};
  offline_update(a, path, 0.37, p);
  const RoutePath paths[] = {path};
  const double f[] = {0.37};
  offline_update(b, paths, f, p);
  EXPECT_EQ(a, b);
}

TEST(OfflineUpdate, ColonyEvaporatesOnce) {
  PheromoneMatrix tau(2, 2, 1.0);
  EvolutionParams p;
  p.rho = 0.5;
  p.epsilon = 0.0;
  const RoutePath paths[] = {RoutePath{{0, 0}}, RoutePath{{0, 0}}};
  const double f[] = {1.0, 2.0};
  offline_update(tau, paths, f, p);
  EXPECT_DOUBLE_EQ(tau.edge(0, 0, 0), 0.5 + 1.0 + 0.5);
  EXPECT_DOUBLE_EQ(tau.edge(0, 1, 1), 0.5);
}

TEST(OfflineUpdate, FloorAndValidation) {
  PheromoneMatrix tau(2, 2, 2e-6);
  EvolutionParams p;
  p.rho = 0.9;
  offline_update(tau, RoutePath{{0, 0}}, 1e12, p);
  EXPECT_EQ(tau.edge(0, 1, 1), kTauMin);
  EXPECT_THROW(offline_update(tau, RoutePath{{0, 0}}, 0.0, p), Error);
  EXPECT_THROW(offline_update(tau, RoutePath{{0, 0, 0}}, 1.0, p), Error);
  p.rho = 1.0;
  EXPECT_THROW(offline_update(tau, RoutePath{{0, 0}}, 1.0, p), Error);
}

// ---------------------------------------------------------------------------

TEST(Warmup, ZeroIterationsLeavesSpecialistsUnchanged) {
  const auto f = fx::two_task();
  WarmupConfig cfg;
  cfg.iterations = 0;
  const auto w = fx::warm(f, cfg, {}, {}, 1);
  EXPECT_EQ(w.specialists, SpecialistSet::uniform(f.graph, 1.0));
  EXPECT_TRUE(w.report.rows.empty());
}

TEST(Warmup, TrainingOneTaskNeverTouchesAnother) {
  const auto f = fx::two_task();
  Rng rng(4);
  Rng calib = rng.fork(1);
  auto outcomes = simulated_outcomes(f.graph, f.pool, f.cost, calib);
  SamplerParams sp;
  SpecialistSet set = SpecialistSet::uniform(f.graph, 1.0);
  const SpecialistSet before = set;
  WarmupConfig cfg;
  cfg.iterations = 50;
  cfg.ants_per_iteration = 4;
  cfg.tasks = {1};
  const auto report = warmup(f.graph, set, outcomes.sources, cfg, {}, sp, idle_bounds(f.graph, sp), rng);
  EXPECT_EQ(set.specialists[0], before.specialists[0]);
  EXPECT_NE(set.specialists[1], before.specialists[1]);
  for (const auto& row : report.rows) EXPECT_EQ(row.task, 1u);
  EXPECT_EQ(report.rows.size(), 50u);
}

TEST(Warmup, DisjointOptimaAreLearned) {
  const auto f = fx::two_task();
  WarmupConfig cfg;
  cfg.iterations = 400;
  cfg.ants_per_iteration = 16;
  SamplerParams sp;
  sp.alpha = 1.5;
  EvolutionParams ep;
  ep.rho = 0.1;
  const auto w = fx::warm(f, cfg, ep, sp, 3);
  for (std::size_t t = 0; t < 2; ++t) {
    const auto best = brute_force_best_path(f.graph, *f.pool, WeightVector::one_hot(2, t), fx::oracle_weights(f, w, t));
    EXPECT_EQ(best.path, t == 0 ? fx::kMathPath : fx::kCodePath);
    const PathSampler s(f.graph, w.specialists, WeightVector::one_hot(2, t), sp, idle_bounds(f.graph, sp));
    EXPECT_EQ(s.greedy(), best.path);
  }
}

TEST(Warmup, SeededRunsAreIdentical) {
  const auto f = fx::dominant();
  WarmupConfig cfg;
  cfg.iterations = 30;
  const auto a = fx::warm(f, cfg, {}, {}, 12);
  const auto b = fx::warm(f, cfg, {}, {}, 12);
  EXPECT_EQ(a.specialists, b.specialists);
}

TEST(Warmup, MissingSourceIsADataError) {
  const auto f = fx::two_task();
  std::vector<OutcomeSource> sources(2);
  sources[0] = [](const RoutePath&, Rng&) { return GradedOutcome{1.0, 0.0}; };
  SpecialistSet set = SpecialistSet::uniform(f.graph);
  Rng rng(1);
  WarmupConfig cfg;
  cfg.iterations = 1;
  try {
    warmup(f.graph, set, sources, cfg, {}, {}, idle_bounds(f.graph, {}), rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Data);
  }
  cfg.tasks = {0};
  EXPECT_NO_THROW(warmup(f.graph, set, sources, cfg, {}, {}, idle_bounds(f.graph, {}), rng));
}

// ---------------------------------------------------------------------------

TEST(EvolutionBufferTest, ZeroRateNeverAdmits) {
  EvolutionBuffer b(4, 0.0);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_FALSE(b.enqueue(record(WeightVector::one_hot(1, 0), RoutePath{{0}}, 1), rng));
  EXPECT_EQ(b.size(), 0u);
}

TEST(EvolutionBufferTest, FifoEviction) {
  EvolutionBuffer b(3, 1.0);
  Rng rng(1);
  for (int i = 0; i < 5; ++i) {
    auto r = record(WeightVector::one_hot(1, 0), RoutePath{{0}}, 1);
    r.query = std::to_string(i);
    EXPECT_TRUE(b.enqueue(r, rng));
  }
  const auto c = b.contents();
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].query, "2");
  EXPECT_EQ(c[1].query, "3");
  EXPECT_EQ(c[2].query, "4");
  EXPECT_TRUE(b.full());
  EXPECT_EQ(b.drain().size(), 3u);
  EXPECT_EQ(b.size(), 0u);
}

TEST(EvolutionBufferTest, AdmissionRate) {
  EvolutionBuffer b(8, 0.5);
  Rng rng(2);
  int admitted = 0;
  for (int i = 0; i < 10'000; ++i) admitted += b.enqueue(record(WeightVector::one_hot(1, 0), RoutePath{{0}}, 1), rng);
  EXPECT_NEAR(admitted / 10'000.0, 0.5, 0.02);
}

// ---------------------------------------------------------------------------

class ThrowingJudge final : public QualityJudge {
 public:
  bool accept(const ServingRecord&) const override { throw std::runtime_error("judge offline"); }
};

TEST(QualityGate, Threshold) {
  ThresholdJudge judge(0.7);
  GateStats stats;
  EXPECT_EQ(quality_gate(judge, record(WeightVector::one_hot(1, 0), RoutePath{{0}}, 0.9), &stats), 1);
  EXPECT_EQ(quality_gate(judge, record(WeightVector::one_hot(1, 0), RoutePath{{0}}, 0.3), &stats), 0);
  EXPECT_EQ(stats.accepted.load(), 1u);
  EXPECT_EQ(stats.rejected.load(), 1u);
}

TEST(QualityGate, FailsClosedOnJudgeError) {
  ThrowingJudge judge;
  GateStats stats;
  EXPECT_EQ(quality_gate(judge, record(WeightVector::one_hot(1, 0), RoutePath{{0}}, 0.9), &stats), 0);
  EXPECT_EQ(stats.incidents.load(), 1u);
  ServingRecord unscored = record(WeightVector::one_hot(1, 0), RoutePath{{0}}, 0.9);
  unscored.quality.reset();
  EXPECT_EQ(quality_gate(ThresholdJudge(0.5), unscored, &stats), 0);
  EXPECT_EQ(stats.incidents.load(), 2u);
}

TEST(SystemFitness, Examples) {
  RouteTrace t;
  t.stages.push_back({{0, 0}, 100, 400, 0.5, 0.0});
  t.wall_time = 0.5;
  EXPECT_DOUBLE_EQ(system_fitness(t, {1.0, 0.0, 0.0, 1.0, LoadStat::Max}), 500.01);
  EXPECT_DOUBLE_EQ(system_fitness(t, {0.0, 0.0, 0.0, 1.0, LoadStat::Max}), 0.01);
}

// ---------------------------------------------------------------------------

TEST(OnlineUpdate, EmptyBatchIsNoOp) {
  const auto f = fx::two_task();
  auto s = SpecialistSet::uniform(f.graph, 1.3);
  const auto before = s;
  online_update(s, {}, f.cost, {});
  EXPECT_EQ(s, before);
}

TEST(OnlineUpdate, WeightedDepositAndPathEvaporation) {
  const auto f = fx::two_task();
  auto s = SpecialistSet::uniform(f.graph, 1.0);
  EvolutionParams p;
  p.rho = 0.1;
  p.Q = 1.0;
  p.epsilon = 0.0;
  // f_sys = 0.99 * wall_time + 0.01 = 1
  const CostWeights unit{0.0, 0.99, 0.0, 1.0, LoadStat::Max};
  const auto rec = record(WeightVector::one_hot(2, 0), fx::kMathPath, 0.9, 1.0);
  online_update(s, std::span(&rec, 1), unit, p);
  EXPECT_NEAR(s.specialists[0].tau.edge(0, 0, 1), 1.9, 1e-12);
  EXPECT_NEAR(s.specialists[1].tau.edge(0, 0, 1), 0.9, 1e-12);
  EXPECT_NEAR(s.specialists[0].tau.source_row()[0], 1.9, 1e-12);
  // off-path edges keep their value under path-scoped evaporation
  EXPECT_EQ(s.specialists[0].tau.edge(0, 3, 3), 1.0);

  auto g = SpecialistSet::uniform(f.graph, 1.0);
  p.online_evaporation = EvaporationScope::Global;
  online_update(g, std::span(&rec, 1), unit, p);
  EXPECT_NEAR(g.specialists[0].tau.edge(0, 3, 3), 0.9, 1e-12);
  EXPECT_NEAR(g.specialists[0].tau.edge(0, 0, 1), 1.9, 1e-12);
}

TEST(OnlineUpdate, ZeroWeightTaskGetsNoDeposit) {
  const auto f = fx::two_task();
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = SpecialistSet::uniform(f.graph, 1.0);
    for (auto& sp : s.specialists) {
      for (double& v : sp.tau.values()) v = rng.uniform(0.1, 5.0);
    }
    auto expected = s.specialists[1].tau;
    const RoutePath path{{rng.index(4), rng.index(4), rng.index(4)}};
    EvolutionParams p;
    p.rho = rng.uniform(0.0, 0.9);
    expected.for_each_path_edge(path, [&](double& v) { v *= 1.0 - p.rho; });
    expected.apply_floor();
    const auto rec = record(WeightVector::one_hot(2, 0), path, 0.9, rng.uniform(0.1, 3.0));
    online_update(s, std::span(&rec, 1), f.cost, p);
    EXPECT_EQ(s.specialists[1].tau, expected);
  }
}

TEST(OnlineUpdate, EntriesStayWithinBounds) {
  const auto f = fx::two_task();
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = SpecialistSet::uniform(f.graph, 1.0);
    double prev_max = 0.0;
    for (auto& sp : s.specialists) {
      for (double& v : sp.tau.values()) {
        v = rng.uniform(1e-6, 100.0);
        prev_max = std::max(prev_max, v);
      }
    }
    EvolutionParams p;
    p.rho = rng.uniform(0.0, 0.9);
    p.online_evaporation = rng.bernoulli(0.5) ? EvaporationScope::Path : EvaporationScope::Global;
    const std::size_t batch_size = 1 + rng.index(32);
    std::vector<ServingRecord> batch;
    for (std::size_t i = 0; i < batch_size; ++i) {
      const WeightVector w({rng.uniform(), rng.uniform()}, true);
      batch.push_back(record(w, RoutePath{{rng.index(4), rng.index(4), rng.index(4)}}, 0.8, rng.uniform(0.0, 2.0)));
    }
    online_update(s, batch, f.cost, p);
    const double upper = prev_max * (1.0 - p.rho) + p.Q / kFitnessFloor * static_cast<double>(batch_size);
    for (const auto& sp : s.specialists) {
      for (double v : sp.tau.values()) {
        EXPECT_GE(v, kTauMin);
        EXPECT_LE(v, upper);
      }
    }
  }
}

// ---------------------------------------------------------------------------

std::vector<ServingRecord> records_for(const fx::Fixture& f, std::size_t n, std::uint64_t seed) {
  const std::vector<RoutePath> paths{fx::kMathPath, fx::kCodePath, RoutePath{{1, 1, 1}}};
  Rng rng(seed);
  std::vector<ServingRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const WeightVector w({0.7, 0.3});
    const auto ex = execute_path(*f.pool, paths[i % 3], w, rng);
    out.push_back({"q" + std::to_string(i), w, paths[i % 3], "", ex.trace, ex.quality});
  }
  return out;
}

TEST(OnlineEvolverTest, RejectAllLeavesSnapshotBitwiseUnchanged) {
  const auto f = fx::two_task();
  const auto initial = SpecialistSet::uniform(f.graph, 1.0);
  SnapshotStore store(initial);
  EvolverConfig ec;
  ec.sampling_rate = 1.0;
  ec.batch_size = 8;
  ec.cost = f.cost;
  OnlineEvolver ev(store, std::make_shared<const RejectAllJudge>(), ec);
  Rng rng(1);
  for (auto& r : records_for(f, 100, 2)) ev.observe(r, rng);
  EXPECT_EQ(*store.load(), initial);
  EXPECT_EQ(ev.stats().published, 0u);
  EXPECT_EQ(ev.stats().batches, 12u);
}

TEST(OnlineEvolverTest, DisabledSamplingNeverUpdates) {
  const auto f = fx::two_task();
  const auto initial = SpecialistSet::uniform(f.graph, 1.0);
  SnapshotStore store(initial);
  EvolverConfig ec;
  ec.sampling_rate = 0.0;
  OnlineEvolver ev(store, std::make_shared<const AcceptAllJudge>(), ec);
  Rng rng(1);
  for (auto& r : records_for(f, 100, 2)) EXPECT_FALSE(ev.observe(r, rng));
  EXPECT_EQ(*store.load(), initial);
}

TEST(OnlineEvolverTest, BackgroundMatchesInline) {
  const auto f = fx::two_task();
  const auto initial = SpecialistSet::uniform(f.graph, 1.0);
  const auto recs = records_for(f, 96, 5);
  auto run = [&](bool background) {
    SnapshotStore store(initial);
    EvolverConfig ec;
    ec.sampling_rate = 1.0;
    ec.batch_size = 16;
    ec.cost = f.cost;
    ec.background = background;
    OnlineEvolver ev(store, std::make_shared<const AcceptAllJudge>(), ec);
    Rng rng(3);
    for (const auto& r : recs) ev.observe(r, rng);
    ev.flush();
    return *store.load();
  };
  const auto a = run(false);
  const auto b = run(true);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.sequence, 6u);
}

TEST(OnlineEvolverTest, ReadersNeverSeeHalfAppliedBatches) {
  const auto f = fx::two_task();
  const auto initial = SpecialistSet::uniform(f.graph, 1.0);
  const auto recs = records_for(f, 640, 6);
  EvolverConfig ec;
  ec.sampling_rate = 1.0;
  ec.batch_size = 16;
  ec.cost = f.cost;

  // Reference state after every batch, keyed by sequence number.
  std::vector<SpecialistSet> expected{initial};
  for (std::size_t b = 0; b * ec.batch_size < recs.size(); ++b) {
    SpecialistSet next = expected.back();
    online_update(next, std::span(recs).subspan(b * ec.batch_size, ec.batch_size), ec.cost, ec.params);
    ++next.sequence;
    expected.push_back(std::move(next));
  }

  SnapshotStore store(initial);
  ec.background = true;
  std::atomic<bool> done{false};
  std::atomic<std::size_t> torn{0}, reads{0};
  std::vector<std::jthread> readers;
  for (int r = 0; r < 3; ++r) {
    readers.emplace_back([&] {
      while (!done.load()) {
        const auto snap = store.load();
        if (snap->sequence >= expected.size() || !(*snap == expected[snap->sequence])) ++torn;
        ++reads;
      }
    });
  }
  {
    OnlineEvolver ev(store, std::make_shared<const AcceptAllJudge>(), ec);
    Rng rng(1);
    for (const auto& r : recs) ev.observe(r, rng);
    ev.flush();
  }
  done = true;
  readers.clear();
  EXPECT_EQ(torn.load(), 0u);
  EXPECT_GT(reads.load(), 0u);
  EXPECT_EQ(*store.load(), expected.back());
}

TEST(EvolutionParamsTest, Validation) {
  EvolutionParams p;
  EXPECT_NO_THROW(p.validate());
  p.Q = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = EvolutionParams{};
  p.epsilon = -1.0;
  EXPECT_THROW(p.validate(), Error);
}

}  // namespace
}  // namespace amro
