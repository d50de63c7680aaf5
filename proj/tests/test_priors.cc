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
#include "aop/maze.h"
#include "aop/planner.h"
#include "aop/priors.h"
#include "aop/replay.h"

namespace aop {
namespace {

PolicyBuffer ConstantActionBuffer(ActionVec a, int n) {
  PolicyBuffer buf(1000);
  for (int i = 0; i < n; ++i) {
    Experience e;
    e.obs = {0.01 * i, 1.0 - 0.01 * i, 0.5, 0.5};
    e.action = a;
    buf.Push(e);
  }
  return buf;
}

TEST_CASE("fresh priors output zero actions") {
  BcPrior bc(4, 2, 1.0, BcConfig{}, 1);
  Td3Prior td3(4, 2, 1.0, Td3Config{}, 1);
  const std::vector<double> obs{0.3, 0.2, 0.8, 0.5};
  CHECK(bc.Act(obs) == ActionVec{0.0, 0.0});
  CHECK(td3.Act(obs) == ActionVec{0.0, 0.0});
}

TEST_CASE("behavior cloning fits a constant action") {
  BcPrior bc(4, 2, 1.0, BcConfig{}, 3);
  const PolicyBuffer buf = ConstantActionBuffer(ActionVec{0.5, -0.25}, 100);
  const double loss = bc.Update(buf, 2000, 64);
  CHECK(loss < 1e-4);
  for (int i = 0; i < 100; i += 17) {
    const ActionVec a = bc.Act(std::vector<double>(buf[i].obs.begin(), buf[i].obs.end()));
    CHECK(std::abs(a[0] - 0.5) < 1e-2);
    CHECK(std::abs(a[1] + 0.25) < 1e-2);
  }
}

TEST_CASE("behavior cloning output is clamped to the action bound") {
  BcPrior bc(4, 2, 1.0, BcConfig{}, 3);
  const PolicyBuffer buf = ConstantActionBuffer(ActionVec{3.0, -3.0}, 50);
  bc.Update(buf, 500, 32);
  const ActionVec a = bc.Act(std::vector<double>{0.1, 0.9, 0.5, 0.5});
  CHECK(a[0] == 1.0);
  CHECK(a[1] == -1.0);
}

TEST_CASE("zero update steps leave the prior unchanged") {
  BcPrior bc(4, 2, 1.0, BcConfig{}, 3);
  const Vector before = bc.network().parameter_vector();
  CHECK(bc.Update(PolicyBuffer(10), 0, 64) == 0.0);
  CHECK(bc.network().parameter_vector() == before);
  CHECK_THROWS_AS(bc.Update(PolicyBuffer(10), 1, 64), Error);
}

TEST_CASE("td3 critic converges on a single-state constant-reward chain") {
  Td3Config cfg;
  cfg.gamma = 0.9;
  cfg.tau = 0.05;
  cfg.hidden = {32, 32};
  Td3Prior td3(1, 1, 1.0, cfg, 5);
  PolicyBuffer buf(1000);
  CounterRng rng(9);
  for (int i = 0; i < 200; ++i) {
    Experience e;
    e.obs = {0.5};
    e.next_obs = {0.5};
    e.action = {2.0 * rng.Uniform() - 1.0};
    e.reward = 1.0;
    buf.Push(e);
  }
  td3.Update(buf, 3000, 64);
  const std::vector<double> obs{0.5};
  for (double a : {-0.8, 0.0, 0.6}) {
    CHECK(td3.Q1(obs, ActionVec{a, 0.0}) == doctest::Approx(10.0).epsilon(0.05));
  }
}

TEST_CASE("td3 delays actor and target updates") {
  Td3Config cfg;
  cfg.policy_delay = 2;
  Td3Prior td3(4, 2, 1.0, cfg, 5);
  PolicyBuffer buf(1000);
  CounterRng rng(2);
  for (int i = 0; i < 200; ++i) {
    Experience e;
    for (int d = 0; d < 4; ++d) {
      e.obs[d] = rng.Uniform();
      e.next_obs[d] = rng.Uniform();
    }
    e.action = {2 * rng.Uniform() - 1, 2 * rng.Uniform() - 1};
    e.reward = -rng.Uniform();
    buf.Push(e);
  }
  const Vector actor0 = td3.actor().parameter_vector();
  const Vector critic0 = td3.critic1().parameter_vector();
  const Vector target0 = td3.critic1_target().parameter_vector();
  td3.Update(buf, 1, 100);
  CHECK(td3.actor().parameter_vector() == actor0);
  CHECK(td3.critic1_target().parameter_vector() == target0);
  CHECK(td3.critic1().parameter_vector() != critic0);
  td3.Update(buf, 1, 100);
  CHECK(td3.actor().parameter_vector() != actor0);
  // soft target: moved, but lags the online network
  const Vector target1 = td3.critic1_target().parameter_vector();
  CHECK(target1 != target0);
  const Vector expected =
      0.995 * target0 + 0.005 * td3.critic1().parameter_vector();
  CHECK((target1 - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(td3.total_steps() == 2);
  CHECK_THROWS_AS(td3.Update(PolicyBuffer(10), 1, 100), Error);
}

TEST_CASE("prior rollout follows the prior through the model") {
  const MazeWorld w(MazeLayout{{}, {{{0.2, 0.5}, {0.8, 0.5}}}}, MazeParams{});
  BcPrior bc(4, 2, 1.0, BcConfig{}, 1);
  const Trajectory empty = PriorRollout(bc, w, w.InitialState(), 0);
  CHECK(empty.horizon() == 0);
  CHECK(empty.states.size() == 1);
  const Trajectory t = PriorRollout(bc, w, w.InitialState(), 12);
  CHECK(t.horizon() == 12);
  const Trajectory replay = ModelRollout(w, w.InitialState(), t.actions);
  CHECK(replay.states == t.states);
  CHECK(replay.rewards == t.rewards);
}

}  // namespace
}  // namespace aop
