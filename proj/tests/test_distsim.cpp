#include <gtest/gtest.h>

#include "corpus.hpp"
#include "pnsat/distsim.hpp"
#include "pnsat/metrics.hpp"
#include "pnsat/symbolic.hpp"

using namespace pnsat;
using namespace pnsat::testing;

namespace {

const char* kToggle =
    "place P1 P2\n"
    "init P1=1\n"
    "trans t1: take P1=1 put P2=1\n"
    "trans t2: take P2=1 put P1=1\n";

std::vector<GlobalState> sequential(Model m) {
  Forest f(m.levels());
  return saturate(m, f).states.enumerate(1 << 20);
}

void expect_partitioned(const ExplicitSimResult& r, const PartitionFn& p) {
  std::size_t total = 0;
  for (std::uint32_t w = 0; w < r.stores.size(); ++w) {
    total += r.stores[w].size();
    for (const auto& s : r.stores[w]) EXPECT_EQ(route(p, s), w + 1);
  }
  EXPECT_EQ(total, r.all_states().size());
}

struct CountingObserver : DescentObserver {
  std::uint64_t top_to_bottom = 0;
  void enter(int from, int to) override {
    if (from == 2 && to == 1) ++top_to_bottom;
  }
  void leave(int, int) override {}
};

}  // namespace

TEST(ExplicitSim, SingleWorkstationSendsNothing) {
  Model m = philosophers(3);
  auto r = run_explicit(m, HashPartition(m.levels(), {1, 2, 3}, 1));
  EXPECT_EQ(r.metrics.totals().messages_sent, 0u);
  EXPECT_EQ(r.metrics.totals().cross_transitions, 0u);
  Model m2 = philosophers(3);
  EXPECT_EQ(r.all_states(), explicit_generate(m2).store.sorted());
  EXPECT_TRUE(r.outcome.inboxes_empty);
}

TEST(ExplicitSim, ConstantPartitionHasNoCommunication) {
  Model m = ring(10);
  auto r = run_explicit(m, ConstantPartition{1, 4});
  EXPECT_EQ(r.metrics.totals().messages_sent, 0u);
  EXPECT_EQ(r.metrics.totals().items_sent, 0u);
  EXPECT_EQ(r.metrics.per_workstation[0].states, 10u);
  for (int w = 1; w < 4; ++w) EXPECT_EQ(r.metrics.per_workstation[w].states, 0u);
}

TEST(ExplicitSim, SelectedLevelHashSendsLessOnTheRing) {
  Model a = ring(10), b = ring(10);
  auto one = run_explicit(a, HashPartition(10, {1}, 4));
  std::vector<int> all;
  for (int k = 1; k <= 10; ++k) all.push_back(k);
  auto every = run_explicit(b, HashPartition(10, all, 4));
  EXPECT_LT(one.metrics.totals().cross_transitions, every.metrics.totals().cross_transitions);
  EXPECT_EQ(one.all_states(), every.all_states());
}

TEST(ExplicitSim, ResultsMatchSequentialAndOwnershipHolds) {
  for (const auto& [name, path] : small_corpus_files()) {
    for (std::uint32_t n : {2u, 3u, 4u}) {
      Model m = load_model(path);
      HashPartition hp(m.levels(), {m.levels(), 1}, n);
      ExplicitSimConfig cfg;
      cfg.buffer = 3;
      auto r = run_explicit(m, hp, cfg);
      EXPECT_EQ(r.all_states(), sequential(load_model(path))) << name;
      EXPECT_TRUE(r.outcome.ownership_sound) << name;
      EXPECT_TRUE(r.outcome.inboxes_empty) << name;
      expect_partitioned(r, hp);
      const auto t = r.metrics.totals();
      EXPECT_EQ(t.messages_sent, t.messages_received) << name;
      EXPECT_EQ(t.items_sent, t.items_received) << name;
    }
  }
}

TEST(ExplicitSim, TreePartitionWithRebalancing) {
  Model m = philosophers(5);
  auto tree = TreePartition::from_warmup(m, 4, 16, 40);
  ExplicitSimConfig cfg;
  cfg.buffer = 8;
  cfg.rebalance_every = 2;
  auto r = run_explicit(m, tree, cfg);
  EXPECT_EQ(r.all_states(), sequential(philosophers(5)));
  EXPECT_TRUE(r.outcome.ownership_sound);
  EXPECT_TRUE(r.outcome.inboxes_empty);
  ASSERT_TRUE(r.metrics.leaf_moves.has_value());
}

TEST(ExplicitSim, TerminationAtQuiescenceUnderRandomDelays) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Model m = ring(12);
    ExplicitSimConfig cfg;
    cfg.buffer = 1 + seed % 4;
    cfg.max_delay = 5;
    cfg.seed = seed;
    auto r = run_explicit(m, HashPartition(12, {1, 2, 3}, 3), cfg);
    EXPECT_EQ(r.outcome.quiescent_step, r.outcome.terminated_step) << seed;
    EXPECT_TRUE(r.outcome.inboxes_empty) << seed;
    EXPECT_EQ(r.all_states().size(), 12u) << seed;
  }
}

TEST(ExplicitSim, Deterministic) {
  Model a = philosophers(4), b = philosophers(4);
  ExplicitSimConfig cfg;
  cfg.max_delay = 3;
  cfg.seed = 42;
  auto r1 = run_explicit(a, HashPartition(a.levels(), {1, 4}, 3), cfg);
  auto r2 = run_explicit(b, HashPartition(b.levels(), {1, 4}, 3), cfg);
  EXPECT_EQ(to_json(r1.metrics), to_json(r2.metrics));
  EXPECT_EQ(r1.stores, r2.stores);
}

TEST(ExplicitSim, TotalsAreSums) {
  Model m = philosophers(4);
  auto r = run_explicit(m, HashPartition(m.levels(), {2}, 3));
  WorkstationMetrics sum;
  for (const auto& w : r.metrics.per_workstation) sum += w;
  EXPECT_EQ(sum, r.metrics.totals());
  EXPECT_EQ(BigInt(sum.states), r.metrics.state_count);
}

TEST(VerticalSim, SingleFullWindowEqualsBfs) {
  Model m = philosophers(3);
  Forest f(m.levels());
  auto r = run_vertical_bfs(m, f, {Window{}});
  Generation g = bfs_generate(m, f);
  EXPECT_EQ(r.all, g.states);
  EXPECT_EQ(r.metrics.totals().messages_sent, 0u);
}

TEST(VerticalSim, ToggleSplitOnTopValue) {
  Model m = parse_model(kToggle);
  Forest f(m.levels());
  const std::vector<Window> windows{{{2, 0, 0}}, {{2, 1, UINT32_MAX}}};
  auto r = run_vertical_bfs(m, f, windows);
  EXPECT_EQ(r.owned[0].enumerate(5), (std::vector<GlobalState>{{0, 1}}));
  EXPECT_EQ(r.owned[1].enumerate(5), (std::vector<GlobalState>{{1, 0}}));
  EXPECT_EQ(r.all.count(), 2);
  EXPECT_TRUE(r.outcome.ownership_sound);
}

TEST(VerticalSim, RejectsOverlappingAndGappedWindows) {
  Model m = parse_model(kToggle);
  Forest f(m.levels());
  EXPECT_THROW(run_vertical_bfs(m, f, {{{2, 0, 1}}, {{2, 1, UINT32_MAX}}}), InvalidPartition);
  EXPECT_THROW(run_vertical_bfs(m, f, {{{2, 0, 0}}, {{2, 2, UINT32_MAX}}}), InvalidPartition);
  EXPECT_THROW(run_vertical_bfs(m, f, {}), InvalidPartition);
}

TEST(VerticalSim, CorpusMatchesSequentialWithRecountedDuplication) {
  for (const auto& [name, path] : corpus_files()) {
    Model m = load_model(path);
    Forest f(m.levels());
    auto r = run_vertical_bfs(m, f, top_level_windows(m.levels(), 4));
    Model m2 = load_model(path);
    Forest g(m2.levels());
    Generation s = saturate(m2, g);
    EXPECT_EQ(r.metrics.state_count, s.metrics.state_count) << name;
    EXPECT_TRUE(r.outcome.ownership_sound) << name;
    EXPECT_TRUE(r.outcome.inboxes_empty) << name;
    EXPECT_EQ(r.outcome.quiescent_step, r.outcome.terminated_step) << name;
    if (s.metrics.state_count > 10000) continue;

    // Rebuild every owned slice in a fresh forest and recount.
    Forest fresh(m.levels());
    std::int64_t sum = 0;
    StateSet un = empty_set(fresh);
    for (const auto& y : r.owned) {
      const auto states = y.enumerate(10000);
      StateSet copy = make_set(fresh, states);
      const NodeRef ref = copy.ref();
      sum += static_cast<std::int64_t>(fresh.reachable_nodes({&ref, 1}));
      un = unite(un, copy);
    }
    const NodeRef uref = un.ref();
    const auto union_nodes = static_cast<std::int64_t>(fresh.reachable_nodes({&uref, 1}));
    ASSERT_TRUE(r.metrics.duplicated_nodes.has_value());
    EXPECT_EQ(*r.metrics.duplicated_nodes, sum - union_nodes) << name;
    EXPECT_GE(*r.metrics.duplicated_nodes, 0) << name;
    EXPECT_EQ(un.enumerate(10000), s.states.enumerate(10000)) << name;
  }
}

TEST(VerticalSim, TerminationUnderRandomDelays) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Model m = philosophers(4);
    Forest f(m.levels());
    VerticalSimConfig cfg;
    cfg.max_delay = 4;
    cfg.seed = seed;
    auto r = run_vertical_bfs(m, f, top_level_windows(m.levels(), 3), cfg);
    EXPECT_EQ(r.outcome.quiescent_step, r.outcome.terminated_step) << seed;
    EXPECT_TRUE(r.outcome.inboxes_empty);
    EXPECT_EQ(r.all.count(), BigInt(oracle_reach(philosophers(4)).size()));
  }
}

TEST(HorizontalSim, RangesValidation) {
  EXPECT_TRUE(ranges_partition(4, {{2, 1}, {4, 3}}));
  EXPECT_FALSE(ranges_partition(4, {{2, 1}, {3, 3}}));
  EXPECT_FALSE(ranges_partition(4, {{4, 3}, {2, 1}}));
  EXPECT_FALSE(ranges_partition(4, {}));
  EXPECT_EQ(equal_ranges(5, 2), (std::vector<LevelRange>{{3, 1}, {5, 4}}));
  EXPECT_EQ(equal_ranges(2, 3), (std::vector<LevelRange>{{1, 1}, {2, 2}, {2, 3}}));
  EXPECT_TRUE(ranges_partition(2, equal_ranges(2, 3)));
  EXPECT_THROW(equal_ranges(2, 0), InvalidPartition);
  Model m = ring(4);
  Forest f(4);
  EXPECT_THROW(run_horizontal_saturation(m, f, {{2, 1}}), InvalidPartition);
}

TEST(HorizontalSim, SingleRangeHasNoMessages) {
  Model m = philosophers(3);
  Forest f(m.levels());
  auto r = run_horizontal_saturation(m, f, {{m.levels(), 1}});
  EXPECT_EQ(r.metrics.totals().requests, 0u);
  EXPECT_EQ(r.metrics.totals().messages_sent, 0u);
  Model m2 = philosophers(3);
  Forest g(m2.levels());
  Generation s = saturate(m2, g);
  EXPECT_EQ(r.resident_nodes, s.metrics.final_nodes);
  // Same operation order, so the same node placement.
  const NodeRef a = r.states.ref(), b = s.states.ref();
  EXPECT_EQ(f.dump({&a, 1}), g.dump({&b, 1}));
}

TEST(HorizontalSim, ToggleOneRequestPerDescent) {
  Model m = parse_model(kToggle);
  Forest f(2);
  auto r = run_horizontal_saturation(m, f, {{1, 1}, {2, 2}});
  EXPECT_EQ(r.metrics.state_count, 2);

  Model m2 = parse_model(kToggle);
  Forest g(2);
  CountingObserver obs;
  g.set_observer(&obs);
  GenerationOptions opts;
  opts.collect_garbage = false;
  saturate(m2, g, opts);
  g.set_observer(nullptr);

  const auto& bottom = r.metrics.per_workstation[0];
  const auto& top = r.metrics.per_workstation[1];
  EXPECT_GT(obs.top_to_bottom, 0u);
  EXPECT_EQ(top.requests, obs.top_to_bottom);
  EXPECT_EQ(bottom.replies, obs.top_to_bottom);
  EXPECT_EQ(bottom.requests, 0u);
  EXPECT_EQ(top.replies, 0u);
}

TEST(HorizontalSim, ZeroDuplicationOnCorpus) {
  for (const auto& [name, path] : corpus_files()) {
    for (std::uint32_t n : {2u, 4u}) {
      for (bool chained : {false, true}) {
        Model m = load_model(path);
        Forest f(m.levels());
        HorizontalSimConfig cfg;
        cfg.chained = chained;
        auto r = run_horizontal_saturation(m, f, equal_ranges(m.levels(), n), cfg);
        Model m2 = load_model(path);
        Forest g(m2.levels());
        Generation s = chained ? chained_saturate(m2, g) : saturate(m2, g);
        std::uint64_t sum = 0;
        for (const auto& w : r.metrics.per_workstation) sum += w.nodes;
        EXPECT_EQ(sum, s.metrics.final_nodes) << name << " N=" << n;
        EXPECT_EQ(r.resident_nodes, s.metrics.final_nodes) << name;
        EXPECT_EQ(r.metrics.state_count, s.metrics.state_count) << name;
        const auto t = r.metrics.totals();
        EXPECT_EQ(t.requests, t.replies) << name;
        EXPECT_EQ(t.messages_sent, t.messages_received) << name;
      }
    }
  }
}

TEST(HorizontalSim, Deterministic) {
  Model a = philosophers(5), b = philosophers(5);
  Forest fa(a.levels()), fb(b.levels());
  auto r1 = run_horizontal_saturation(a, fa, equal_ranges(a.levels(), 4));
  auto r2 = run_horizontal_saturation(b, fb, equal_ranges(b.levels(), 4));
  EXPECT_EQ(to_json(r1.metrics), to_json(r2.metrics));
}
