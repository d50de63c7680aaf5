// Copyright 2026 The aoplab Authors
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

#include <cmath>
#include <vector>

#include <doctest.h>

#include "aop/errors.h"
#include "aop/regret.h"
#include "aop/rng.h"

namespace aop {
namespace {

TabularMdp TwoState() {
  TabularMdp m;
  m.num_states = 2;
  m.num_actions = 1;
  m.gamma = 0.5;
  m.next = {1, 1};
  m.reward = {0.0, 1.0};
  return m;
}

TEST_CASE("value iteration closed forms") {
  TabularMdp one;
  one.num_states = 1;
  one.num_actions = 1;
  one.gamma = 0.9;
  one.next = {0};
  one.reward = {1.0};
  CHECK(ValueIteration(one).values[0] == doctest::Approx(10.0).epsilon(1e-12));

  const auto v = ValueIteration(TwoState()).values;
  CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(2.0).epsilon(1e-12));

  TabularMdp zero = RandomMdp(5, 3, 0.9, 1);
  std::fill(zero.reward.begin(), zero.reward.end(), 0.0);
  for (double x : ValueIteration(zero).values) CHECK(x == 0.0);
}

TEST_CASE("value iteration is optimal on random instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TabularMdp m = RandomMdp(12, 3, 0.9, seed);
    const ValueIterationResult vi = ValueIteration(m);
    CHECK(vi.residual < 1e-9);
    const auto v_pi = PolicyValue(m, vi.policy);
    CounterRng rng(seed);
    std::vector<int> other(m.num_states);
    for (int& a : other) a = static_cast<int>(rng() % m.num_actions);
    const auto v_other = PolicyValue(m, other);
    for (int s = 0; s < m.num_states; ++s) {
      CHECK(std::abs(v_pi[s] - vi.values[s]) < 1e-9);
      CHECK(v_other[s] <= vi.values[s] + 1e-9);
    }
  }
}

TEST_CASE("mdp validation") {
  TabularMdp bad = TwoState();
  bad.next = {2, 1};
  CHECK_THROWS_AS(bad.Validate(), Error);
  bad = TwoState();
  bad.reward = {0.0, 2.0};
  CHECK_THROWS_AS(bad.Validate(), Error);
  bad = TwoState();
  bad.gamma = 1.0;
  CHECK_THROWS_AS(bad.Validate(), Error);
}

TEST_CASE("horizon planning with exact values recovers the optimum") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TabularMdp m = RandomMdp(10, 3, 0.9, seed);
    const auto v = ValueIteration(m).values;
    for (int h = 1; h <= 4; ++h) {
      const HorizonPlanResult p = HorizonPlan(m, 0, h, v);
      CHECK(p.objective == doctest::Approx(v[0]).epsilon(1e-10));
      CHECK(static_cast<int>(p.actions.size()) == h);
      CHECK(p.path.states.size() == static_cast<std::size_t>(h + 1));
    }
  }
}

TEST_CASE("horizon planning refuses oversized searches") {
  const TabularMdp m = RandomMdp(4, 8, 0.9, 0);
  const std::vector<double> v(4, 0.0);
  CHECK_NOTHROW(HorizonPlan(m, 0, 7, v));
  try {
    HorizonPlan(m, 0, 8, v);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooLarge);
  }
}

TEST_CASE("regret bound closed form") {
  CHECK(RegretBound(1.0, 0.5, 1, 0.0, 0.0) == doctest::Approx(4.0));
  CHECK(RegretBound(1.0, 0.5, 1, 0.25, 0.5) == doctest::Approx(5.0));
  CHECK(RegretBound(2.0, 0.9, 2, 0.0, 0.0) ==
        doctest::Approx(2 * 2.0 * (1 - 0.81) / (0.81 * 0.1)));
}

TEST_CASE("exact values give zero regret") {
  const TabularMdp m = RandomMdp(8, 3, 0.9, 4);
  const auto v = ValueIteration(m).values;
  const RegretReport r = ComputeRegret(m, 0, 3, v);
  CHECK(std::abs(r.regret) < 1e-9);
  CHECK(r.eps_v < 1e-9);
  CHECK(r.eps_p < 1e-9);
  CHECK(r.Holds());
}

TEST_CASE("regret decomposes and stays under the bound") {
  RegretSweepConfig cfg;
  cfg.instances = 60;
  cfg.seed = 11;
  const auto rows = RegretSweep(cfg);
  REQUIRE(rows.size() == 60);
  int negative_short = 0;
  for (const RegretSweepRow& row : rows) {
    CHECK(row.num_states >= 1);
    CHECK(row.num_states <= cfg.max_states);
    CHECK(row.num_actions <= cfg.max_actions);
    CHECK(row.report.horizon >= 1);
    CHECK(row.report.horizon <= cfg.max_horizon);
    CHECK(row.report.Holds());
    CHECK(row.report.DecompositionGap() < 1e-9);
    CHECK(row.report.regret >= -1e-9);
    negative_short += row.report.short_term < 0.0;
  }
  CHECK(negative_short > 0);
  CHECK_THROWS_AS(RegretSweep(RegretSweepConfig{.instances = 0}), Error);
}

TEST_CASE("rank helpers") {
  CHECK(RankDescending({3.0, 1.0, 2.0}) == std::vector<double>{1.0, 3.0, 2.0});
  CHECK(RankDescending({1.0, 1.0, 0.0}) == std::vector<double>{1.5, 1.5, 3.0});
  CHECK(KendallTau({1, 2, 3, 4}, {1, 2, 3, 4}) == doctest::Approx(1.0));
  CHECK(KendallTau({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(KendallTau({1, 1, 1}, {1, 2, 3}) == 0.0);
  CHECK_THROWS_AS(KendallTau({1, 2}, {1}), Error);
}

TEST_CASE("identical trajectories tie at every horizon") {
  RankedTrajectory t{{0.5, 0.2, 0.1}, {1.0, 0.9, 0.8, 0.7}, 1.0};
  const auto ranks = RankingMatrix({t, t, t}, 3, 0.9);
  REQUIRE(ranks.size() == 3);
  for (const auto& col : ranks) CHECK(col == std::vector<double>(3, 2.0));
  CHECK_THROWS_AS(RankingMatrix({t}, 4, 0.9), Error);
}

TEST_CASE("delayed rewards invert short-horizon rankings") {
  const int depth = 5;
  const TabularMdp m = DelayedRewardMdp(3, depth, 0.9);
  const auto pop = DelayedRewardPopulation(m, depth, false);
  const auto oracle = OracleRanks(pop);
  CHECK(oracle == std::vector<double>{3.0, 2.0, 1.0});
  const auto ranks = RankingMatrix(pop, depth, 0.9);
  CHECK(KendallTau(ranks[0], oracle) == doctest::Approx(-1.0));
  CHECK(KendallTau(ranks[depth - 1], oracle) == doctest::Approx(1.0));

  const auto exact = DelayedRewardPopulation(m, depth, true);
  for (const auto& col : RankingMatrix(exact, depth, 0.9)) {
    CHECK(KendallTau(col, OracleRanks(exact)) == doctest::Approx(1.0));
  }
}

}  // namespace
}  // namespace aop
