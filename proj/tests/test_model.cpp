#include <gtest/gtest.h>

#include <random>

#include "corpus.hpp"
#include "pnsat/model.hpp"

using namespace pnsat;
using namespace pnsat::testing;

namespace {

const char* kToggle =
    "place P1 P2\n"
    "init P1=1\n"
    "trans t1: take P1=1 put P2=1\n"
    "trans t2: take P2=1 put P1=1\n";

}  // namespace

TEST(ParseModel, ToggleHasTwoLevelsAndTopTwo) {
  Model m = parse_model(kToggle);
  EXPECT_EQ(m.levels(), 2);
  ASSERT_EQ(m.events().size(), 2u);
  for (const auto& e : m.events()) {
    EXPECT_EQ(e.top, 2);
    EXPECT_TRUE(e.touches(2));
    EXPECT_TRUE(e.touches(1));
  }
  EXPECT_EQ(m.level_of("P1"), 2);
  EXPECT_EQ(m.level_of("P2"), 1);
  EXPECT_EQ(m.initial_states(), std::vector<GlobalState>{GlobalState({1, 0})});
  EXPECT_EQ(m.domain(2), 2u);
  EXPECT_EQ(m.domain(1), 1u);
}

TEST(ParseModel, NoTransitionsIsValid) {
  Model m = parse_model("place A B\ninit A=2\n");
  EXPECT_TRUE(m.events().empty());
  EXPECT_EQ(m.domain(2), 3u);
}

TEST(ParseModel, MissingInitMeansAllZero) {
  Model m = parse_model("place A B\n");
  EXPECT_EQ(m.initial_states(), std::vector<GlobalState>{GlobalState({0, 0})});
}

TEST(ParseModel, ExtraInitialStates) {
  Model m = parse_model("place A B\ninit A=1\ninit+ B=1\ninit+ A=1 B=1\n");
  ASSERT_EQ(m.initial_states().size(), 3u);
  EXPECT_EQ(m.initial_states()[1], GlobalState({0, 1}));
  EXPECT_EQ(m.initial_states()[2], GlobalState({1, 1}));
}

TEST(ParseModel, CommentsAndRepeatedPlaceLines) {
  Model m = parse_model("# header\nplace A   # first\nplace B C\n\ninit C=4 # end\n");
  EXPECT_EQ(m.levels(), 3);
  EXPECT_EQ(m.place_at(3), "A");
  EXPECT_EQ(m.place_at(1), "C");
  EXPECT_EQ(m.domain(1), 5u);
}

TEST(ParseModel, EmptyArcListsAllowedOnOneSide) {
  Model m = parse_model("place A\ntrans src: take put A=1\ntrans sink: take A=1 put\n");
  EXPECT_EQ(m.events()[0].locals.at(1), (LocalFn{0, 1}));
  EXPECT_EQ(m.events()[1].locals.at(1), (LocalFn{1, 0}));
}

TEST(ParseModel, SamePlaceOnBothSides) {
  Model m = parse_model("place A B\ntrans t: take A=2 put A=1 B=3\n");
  EXPECT_EQ(m.events()[0].locals.at(2), (LocalFn{2, 1}));
  EXPECT_EQ(m.events()[0].locals.at(1), (LocalFn{0, 3}));
  EXPECT_EQ(m.events()[0].bottom, 1);
}

struct BadInput {
  const char* text;
  int line;
};

class ParseErrors : public ::testing::TestWithParam<BadInput> {};

TEST_P(ParseErrors, ReportLine) {
  try {
    parse_model(GetParam().text);
    FAIL() << "accepted: " << GetParam().text;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), GetParam().line) << e.what();
  }
}

INSTANTIATE_TEST_SUITE_P(
    Model, ParseErrors,
    ::testing::Values(BadInput{"place A\nfoo A\n", 2},
                      BadInput{"place A\ntrans t: take B=1 put A=1\n", 2},
                      BadInput{"place A\ninit A=-1\n", 2},
                      BadInput{"place A\ntrans t: take A=-2 put\n", 2},
                      BadInput{"place A\ninit A=1\ninit A=2\n", 3},
                      BadInput{"place A\ninit+ A=1\n", 2},
                      BadInput{"place A\ntrans t: put A=1\n", 2},
                      BadInput{"place A\ntrans t: take A=1\n", 2},
                      BadInput{"place A\ntrans t: take put\n", 2},
                      BadInput{"place A\ntrans t: take A=1 put A=1\ntrans t: take A=1 put\n", 3},
                      BadInput{"place A A\n", 1},
                      BadInput{"place A\ninit A=x\n", 2},
                      BadInput{"place A\ninit A\n", 2},
                      BadInput{"init A=1\nplace A\n", 1},
                      BadInput{"place A\ntrans t take A=1 put\n", 2},
                      BadInput{"Place A\n", 1}));

TEST(ParseModel, NoPlacesIsAnError) { EXPECT_THROW(parse_model("# nothing\n"), ParseError); }

TEST(FireEvent, RingRoundTripOverAllStates) {
  Model m = ring(10);
  ASSERT_EQ(m.events().size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& e = m.events()[i];
    EXPECT_EQ(e.locals.size(), 2u);
    // State with the token on place i+1 (level 10-i).
    GlobalState s(10, 0);
    s[i] = 1;
    GlobalState expect(10, 0);
    expect[(i + 1) % 10] = 1;
    EXPECT_EQ(fire_event(m, e, s), std::vector<GlobalState>{expect});
    EXPECT_EQ(fire_event_backward(m, e, expect), std::vector<GlobalState>{s});
    for (std::size_t j = 0; j < 10; ++j) {
      if (j == i) continue;
      GlobalState other(10, 0);
      other[j] = 1;
      EXPECT_TRUE(fire_event(m, e, other).empty());
    }
  }
}

TEST(FireEvent, ToggleExamples) {
  Model m = parse_model(kToggle);
  EXPECT_EQ(fire_event(m, m.events()[0], {1, 0}), std::vector<GlobalState>{GlobalState({0, 1})});
  EXPECT_TRUE(fire_event(m, m.events()[0], {0, 1}).empty());
  EXPECT_EQ(next_states(m, {1, 0}), std::vector<GlobalState>{GlobalState({0, 1})});
}

TEST(FireEvent, DomainGrowsWithBuffer) {
  Model m = parse_model("place P B\ninit P=1\ntrans make: take P=1 put P=1 B=1\n");
  GlobalState s = m.initial_states()[0];
  std::uint32_t max_b = 0;
  for (int i = 0; i < 3; ++i) {
    s = fire_event(m, m.events()[0], s).at(0);
    max_b = std::max(max_b, m.at(s, 1));
  }
  EXPECT_EQ(max_b, 3u);
  EXPECT_EQ(m.domain(1), max_b + 1);
}

TEST(NextStates, NoEventsMeansDead) {
  Model m = parse_model("place A\ninit A=1\n");
  EXPECT_TRUE(next_states(m, {1}).empty());
}

TEST(NextStates, PhilosophersMatchPerEventFiring) {
  Model m = philosophers(3);
  for (const auto& s : oracle_reach(m)) EXPECT_EQ(next_states(m, s), oracle_successors(m, s));
}

TEST(ModelProperties, LocalityDeterminismAndMonotoneDomains) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Model m = random_net(rng);
    for (const auto& e : m.events()) {
      int top = 0;
      for (const auto& [level, fn] : e.locals) top = std::max(top, level);
      EXPECT_EQ(top, e.top);
      EXPECT_FALSE(e.locals.empty());
    }
    std::uniform_int_distribution<std::uint32_t> val(0, 3);
    for (int k = 0; k < 20; ++k) {
      GlobalState s(m.levels());
      for (auto& v : s) v = val(rng);
      for (const auto& e : m.events()) {
        const auto before = m.domains();
        auto out = fire_event(m, e, s);
        ASSERT_LE(out.size(), 1u);
        for (std::size_t i = 0; i < before.size(); ++i) EXPECT_GE(m.domains()[i], before[i]);
        if (out.empty()) continue;
        for (int level = 1; level <= m.levels(); ++level) {
          if (!e.touches(level)) {
            EXPECT_EQ(m.at(out[0], level), m.at(s, level));
          }
        }
        for (const auto& [level, fn] : e.locals) EXPECT_LT(m.at(out[0], level), m.domain(level));
      }
    }
  }
}

TEST(ModelFiles, CorpusLoads) {
  for (const auto& [name, path] : corpus_files()) {
    Model m = load_model(path);
    EXPECT_GE(m.levels(), 2) << name;
  }
  EXPECT_THROW(load_model("/nonexistent/model.pn"), std::runtime_error);
}

TEST(FormatState, Parenthesised) { EXPECT_EQ(format_state({1, 0, 12}), "(1,0,12)"); }
