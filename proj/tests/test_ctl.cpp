#include <gtest/gtest.h>

#include <random>

#include "corpus.hpp"
#include "pnsat/symbolic.hpp"

using namespace pnsat;
using namespace pnsat::testing;

namespace {

struct Atom {
  int level;
  Comparison cmp;
  std::uint32_t value;

  bool holds(const Model& m, const GlobalState& s) const {
    const auto v = m.at(s, level);
    switch (cmp) {
      case Comparison::Equal:
        return v == value;
      case Comparison::AtLeast:
        return v >= value;
      case Comparison::AtMost:
        return v <= value;
    }
    return false;
  }
};

std::vector<bool> mask(const Model& m, const ExplicitGraph& g, const Atom& a) {
  std::vector<bool> out;
  for (const auto& s : g.states) out.push_back(a.holds(m, s));
  return out;
}

std::size_t count(const std::vector<bool>& v) { return std::count(v.begin(), v.end(), true); }

StateSetOracle pick(const ExplicitGraph& g, const std::vector<bool>& v) {
  StateSetOracle out;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i]) out.insert(g.states[i]);
  return out;
}

StateSetOracle to_oracle(const StateSet& s) {
  auto v = s.enumerate(1 << 20);
  return {v.begin(), v.end()};
}

std::vector<Atom> atoms_for(const Model& m) {
  std::vector<Atom> out;
  for (int k = 1; k <= m.levels(); ++k) {
    out.push_back({k, Comparison::AtLeast, 1});
    out.push_back({k, Comparison::Equal, 0});
    out.push_back({k, Comparison::AtMost, 1});
  }
  return out;
}

void check_against_oracle(Model& m, const std::string& name, std::size_t max_atoms) {
  Forest f(m.levels());
  Generation gen = saturate(m, f);
  const StateSet& reach = gen.states;
  const ExplicitGraph g = oracle_graph(m);
  ASSERT_EQ(to_oracle(reach), StateSetOracle(g.states.begin(), g.states.end())) << name;
  auto atoms = atoms_for(m);
  if (atoms.size() > max_atoms) atoms.resize(max_atoms);
  for (std::size_t x = 0; x < atoms.size(); ++x) {
    const Atom& a = atoms[x];
    const Atom& b = atoms[(x * 7 + 3) % atoms.size()];
    StateSet sa = predicate_set(f, a.level, a.cmp, a.value);
    StateSet sb = predicate_set(f, b.level, b.cmp, b.value);
    const auto ma = mask(m, g, a), mb = mask(m, g, b);
    EXPECT_EQ(to_oracle(ex(m, sa, reach)), pick(g, oracle_ex(g, ma))) << name << " EX " << x;
    EXPECT_EQ(to_oracle(eu(m, sa, sb, reach)), pick(g, oracle_eu(g, ma, mb))) << name << " EU " << x;
    EXPECT_EQ(to_oracle(eg(m, sa, reach)), pick(g, oracle_eg(g, ma))) << name << " EG " << x;
  }
}

}  // namespace

TEST(Ctl, EuWithEmptyLeftIsRight) {
  Model m = philosophers(3);
  Forest f(m.levels());
  Generation g = saturate(m, f);
  StateSet b = intersect(predicate_set(f, m.level_of("eat1"), Comparison::AtLeast, 1), g.states);
  EXPECT_EQ(eu(m, empty_set(f), b, g.states), b);
}

TEST(Ctl, EgOfEverythingWithSelfLoopsIsEverything) {
  Model m = parse_model(
      "place A B\ninit A=1\n"
      "trans move: take A=1 put B=1\n"
      "trans back: take B=1 put A=1\n"
      "trans stay: take A=1 put A=1\n"
      "trans rest: take B=1 put B=1\n");
  Forest f(m.levels());
  Generation g = saturate(m, f);
  EXPECT_EQ(eg(m, g.states, g.states), g.states);
}

TEST(Ctl, EgDropsDeadlocks) {
  Model m = parse_model("place A B\ninit A=1\ntrans t: take A=1 put B=1\n");
  Forest f(m.levels());
  Generation g = saturate(m, f);
  EXPECT_TRUE(eg(m, g.states, g.states).empty());
  EXPECT_EQ(ex(m, g.states, g.states).enumerate(5), (std::vector<GlobalState>{{1, 0}}));
}

TEST(Ctl, ExOfEmptyIsEmpty) {
  Model m = ring(5);
  Forest f(m.levels());
  Generation g = saturate(m, f);
  EXPECT_TRUE(ex(m, empty_set(f), g.states).empty());
}

TEST(Ctl, PredicateSets) {
  Model m = parse_model("place A B\ninit A=2\ntrans t: take A=1 put B=1\n");
  Forest f(m.levels());
  Generation g = saturate(m, f);
  EXPECT_EQ(intersect(predicate_set(f, 2, Comparison::AtLeast, 1), g.states).count(), 2);
  EXPECT_EQ(intersect(predicate_set(f, 2, Comparison::Equal, 0), g.states).enumerate(5),
            (std::vector<GlobalState>{{0, 2}}));
  EXPECT_EQ(intersect(predicate_set(f, 1, Comparison::AtMost, 1), g.states).count(), 2);
  EXPECT_TRUE(intersect(predicate_set(f, 1, Comparison::AtLeast, 9), g.states).empty());
}

TEST(Ctl, PhilosophersEuAgainstBackwardSearch) {
  Model m = philosophers(3);
  Forest f(m.levels());
  Generation gen = saturate(m, f);
  const ExplicitGraph g = oracle_graph(m);
  const Atom thinking{m.level_of("think1"), Comparison::AtLeast, 1};
  const Atom eating{m.level_of("eat1"), Comparison::AtLeast, 1};
  StateSet a = predicate_set(f, thinking.level, thinking.cmp, thinking.value);
  StateSet b = predicate_set(f, eating.level, eating.cmp, eating.value);
  const auto want = oracle_eu(g, mask(m, g, thinking), mask(m, g, eating));
  StateSet got = eu(m, a, b, gen.states);
  EXPECT_EQ(to_oracle(got), pick(g, want));
  EXPECT_EQ(got.count(), count(want));
}

TEST(Ctl, PhilosophersEgAgainstOracle) {
  Model m = philosophers(3);
  Forest f(m.levels());
  Generation gen = saturate(m, f);
  const ExplicitGraph g = oracle_graph(m);
  const Atom no_eat{m.level_of("eat2"), Comparison::Equal, 0};
  const auto want = oracle_eg(g, mask(m, g, no_eat));
  StateSet got = eg(m, predicate_set(f, no_eat.level, no_eat.cmp, no_eat.value), gen.states);
  EXPECT_EQ(got.count(), count(want));
}

TEST(Ctl, CorpusAgainstOracle) {
  for (const auto& [name, path] : small_corpus_files()) {
    Model m = load_model(path);
    check_against_oracle(m, name, 12);
  }
}

TEST(Ctl, RandomNetsAgainstOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    Model m = random_net(rng);
    check_against_oracle(m, "random " + std::to_string(trial), 6);
  }
}
