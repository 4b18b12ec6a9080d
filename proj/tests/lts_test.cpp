// Copyright 2026 The quantsyn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "quantsyn/lts.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace quantsyn {
namespace {

// Path-enumeration worst case: longest path to the first goal hit, nullopt
// when some path avoids the goal forever or gets stuck.
std::optional<std::size_t> brute_distance(const ExplicitLts& lts, const StateSet& goal, unsigned s,
                                          std::vector<int>& on_stack) {
  if (on_stack[s]) return std::nullopt;
  on_stack[s] = 1;
  std::optional<std::size_t> worst = 0;
  bool any = false;
  for (unsigned a = 0; a < lts.action_count() && worst; ++a) {
    for (unsigned t : lts.img(s, a)) {
      any = true;
      if (goal.count(t)) continue;
      const auto d = brute_distance(lts, goal, t, on_stack);
      if (!d) {
        worst.reset();
        break;
      }
      worst = std::max(*worst, *d);
    }
  }
  on_stack[s] = 0;
  if (!any || !worst) return std::nullopt;
  return *worst + 1;
}

DistanceMap brute_distances(const ExplicitLts& lts, const StateSet& goal) {
  DistanceMap out(lts.state_count());
  for (unsigned s = 0; s < lts.state_count(); ++s) {
    std::vector<int> stack(lts.state_count(), 0);
    out[s] = brute_distance(lts, goal, s, stack);
  }
  return out;
}

TEST(ExplicitLtsTest, ExampleStructure) {
  const auto ex = example_lts();
  EXPECT_EQ(ex.lts.state_count(), 5u);
  EXPECT_EQ(ex.lts.transition_count(), 10u);
  EXPECT_EQ(ex.goal, StateSet{0});
  EXPECT_EQ(ex.lts.adm(3), (std::vector<unsigned>{0, 1}));
  EXPECT_EQ(ex.lts.img(4, 1), (std::vector<unsigned>{0}));
  EXPECT_TRUE(ex.lts.has(2, 1, 3));
  EXPECT_FALSE(ex.lts.has(2, 1, 1));
}

TEST(ExplicitLtsTest, RangeChecks) {
  ExplicitLts lts(2, 1);
  EXPECT_THROW(lts.add(2, 0, 0), UsageError);
  EXPECT_THROW(lts.add(0, 1, 0), UsageError);
  lts.add(0, 0, 1);
  lts.add(0, 0, 1);
  EXPECT_EQ(lts.transition_count(), 1u);
  EXPECT_TRUE(lts.adm(1).empty());
}

TEST(ExplicitLtsTest, ClosedLoopAndControllerChecks) {
  const auto ex = example_lts();
  const ControllerRel k{{3, 1}, {1, 0}};
  const ExplicitLts cl = closed_loop(ex.lts, k);
  EXPECT_EQ(cl.transition_count(), 2u);
  EXPECT_TRUE(cl.has(3, 1, 1));
  EXPECT_EQ(domain(k), (StateSet{1, 3}));
  EXPECT_TRUE(is_controller(ex.lts, k));
  EXPECT_TRUE(is_control_law(k));
  EXPECT_FALSE(is_control_law(ControllerRel{{3, 0}, {3, 1}}));
  ExplicitLts dead(2, 1);
  dead.add(0, 0, 1);
  EXPECT_FALSE(is_controller(dead, ControllerRel{{1, 0}}));
  EXPECT_THROW(closed_loop(dead, ControllerRel{{1, 0}}), UsageError);
}

TEST(ExplicitLtsTest, WorstCaseDistanceOnExample) {
  const auto ex = example_lts();
  const auto mgo = mgo_oracle(ex.lts, {0, 1, 2, 3, 4}, ex.goal);
  const auto j = worst_case_distance(closed_loop(ex.lts, mgo.controller), ex.goal);
  ASSERT_TRUE(j[3]);
  EXPECT_EQ(*j[3], 2u);
  ControllerRel wider = mgo.controller;
  wider.emplace(3, 0);
  const auto j2 = worst_case_distance(closed_loop(ex.lts, wider), ex.goal);
  ASSERT_TRUE(j2[3]);
  EXPECT_EQ(*j2[3], 3u);
  // The uncontrolled system has a cycle 1 -> 2 -> 3 -> 1 avoiding the goal.
  const auto open = worst_case_distance(ex.lts, ex.goal);
  EXPECT_FALSE(open[1]);
  EXPECT_FALSE(open[3]);
  EXPECT_FALSE(open[4]);  // self-loop under action 0
  EXPECT_EQ(open[0], std::optional<std::size_t>(1));
}

TEST(ExplicitLtsTest, MgoOracleOnExample) {
  const auto ex = example_lts();
  const auto r = mgo_oracle(ex.lts, {3}, ex.goal);
  const ControllerRel expected{{0, 0}, {0, 1}, {1, 0}, {2, 0}, {3, 1}, {4, 1}};
  EXPECT_TRUE(r.initial_controllable);
  EXPECT_EQ(r.controller, expected);
  EXPECT_EQ(r.domain, (StateSet{0, 1, 2, 3, 4}));
  EXPECT_TRUE(is_solution(ex.lts, r.controller, {0, 1, 2, 3, 4}, ex.goal));
  EXPECT_EQ(avg_worst_case_path(ex.lts, r.controller, ex.goal), Rational(7, 5));
}

TEST(ExplicitLtsTest, AveragePathOfDeterministicLaw) {
  const auto ex = example_lts();
  const ControllerRel law{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 1}};
  EXPECT_TRUE(is_solution(ex.lts, law, {0, 1, 2, 3, 4}, ex.goal));
  EXPECT_EQ(avg_worst_case_path(ex.lts, law, ex.goal), Rational(8, 5));
  EXPECT_THROW(avg_worst_case_path(ex.lts, ControllerRel{}, ex.goal), UsageError);
}

TEST(ExplicitLtsTest, EmptyAndFullGoal) {
  const auto ex = example_lts();
  const auto none = mgo_oracle(ex.lts, {3}, {});
  EXPECT_FALSE(none.initial_controllable);
  EXPECT_TRUE(none.controller.empty());
  const auto all = mgo_oracle(ex.lts, {3}, {0, 1, 2, 3, 4});
  EXPECT_TRUE(all.initial_controllable);
  // Every pair with a successor goes straight into the goal.
  EXPECT_EQ(all.controller.size(), ex.lts.transition_count());
}

TEST(ExplicitLtsTest, NonSolutions) {
  const auto ex = example_lts();
  EXPECT_FALSE(is_solution(ex.lts, ControllerRel{{1, 1}, {2, 1}, {3, 1}}, {1}, ex.goal));
  EXPECT_FALSE(is_solution(ex.lts, ControllerRel{{4, 1}}, {3}, ex.goal));
}

TEST(ExplicitLtsTest, FixtureRoundTrip) {
  const auto ex = example_lts();
  std::ostringstream os;
  write_lts(os, ex);
  const auto back = parse_lts("# comment\n" + os.str());
  EXPECT_EQ(back.lts, ex.lts);
  EXPECT_EQ(back.goal, ex.goal);
  EXPECT_THROW(parse_lts(""), UsageError);
  EXPECT_THROW(parse_lts("states 2 actions 1 goal 0\n0 0 5\n"), UsageError);
  EXPECT_THROW(parse_lts("states 2 actions 1 goal 0\n0 0\n"), UsageError);
  EXPECT_THROW(parse_lts("states 2 actions 1 goal 0\n0 0 1 extra\n"), UsageError);
}

TEST(ExplicitLtsTest, RandomIsReproducible) {
  const auto a = random_lts(12, 3, 0.2, 99);
  const auto b = random_lts(12, 3, 0.2, 99);
  EXPECT_EQ(a.lts, b.lts);
  EXPECT_EQ(a.goal, b.goal);
  EXPECT_FALSE(a.goal.empty());
}

TEST(ExplicitLtsTest, DistanceMatchesPathEnumeration) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto f = random_lts(7, 2, 0.25, seed);
    EXPECT_EQ(worst_case_distance(f.lts, f.goal), brute_distances(f.lts, f.goal)) << seed;
  }
}

// Exhaustive check over every controller of small systems: the oracle is a
// solution whenever one exists, it is pointwise no worse than any solution,
// and it contains every solution that matches its distances.
TEST(ExplicitLtsTest, OracleIsMostGeneralOptimal) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto f = random_lts(6, 2, 0.3, seed);
    std::vector<std::pair<unsigned, unsigned>> pairs;
    for (unsigned s = 0; s < 6; ++s) {
      for (unsigned a : f.lts.adm(s)) pairs.emplace_back(s, a);
    }
    const auto mgo = mgo_oracle(f.lts, {}, f.goal);
    ASSERT_TRUE(is_solution(f.lts, mgo.controller, {}, f.goal));
    const auto j_mgo = worst_case_distance(closed_loop(f.lts, mgo.controller), f.goal);
    for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
      ControllerRel k;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if ((mask >> i) & 1u) k.insert(pairs[i]);
      }
      if (!is_solution(f.lts, k, {}, f.goal)) continue;
      const auto j = worst_case_distance(closed_loop(f.lts, k), f.goal);
      bool same = true;
      for (unsigned s : domain(k)) {
        ASSERT_TRUE(mgo.domain.count(s)) << "seed " << seed << " state " << s;
        ASSERT_LE(*j_mgo[s], *j[s]) << "seed " << seed << " state " << s;
        same = same && *j_mgo[s] == *j[s];
      }
      if (same) {
        EXPECT_TRUE(std::includes(mgo.controller.begin(), mgo.controller.end(), k.begin(), k.end()))
            << "seed " << seed << " mask " << mask;
      }
    }
  }
}

}  // namespace
}  // namespace quantsyn
