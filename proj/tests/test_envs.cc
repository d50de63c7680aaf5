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

#include "aop/env.h"
#include "aop/errors.h"
#include "aop/maze.h"
#include "aop/rng.h"
#include "aop/sink_chain.h"
#include "aop/trajectory.h"

namespace aop {
namespace {

MazeWorld OpenMaze(RewardMode mode, Point2 g0 = {0.2, 0.5},
                   Point2 g1 = {0.8, 0.5}) {
  MazeParams p;
  p.reward_mode = mode;
  return MazeWorld(MazeLayout{{}, {g0, g1}}, p);
}

StateVec At(double x, double y, double vx = 0, double vy = 0, double goal = 1) {
  return StateVec{x, y, vx, vy, goal, 0};
}

std::vector<ActionVec> RandomActions(int n, std::uint64_t seed, double scale = 1.5) {
  CounterRng rng(seed);
  std::vector<ActionVec> out(n);
  for (auto& a : out) {
    a[0] = scale * (2 * rng.Uniform() - 1);
    a[1] = scale * (2 * rng.Uniform() - 1);
  }
  return out;
}

TEST_CASE("dense maze: reward is minus the distance to the goal") {
  const MazeWorld w = OpenMaze(RewardMode::kDense, {0.2, 0.5}, {0.8, 0.5});
  // goal 1 at (0.8, 0.5); agent at (0.3, 0.5) at rest
  const Transition tr = w.Step(At(0.3, 0.5), ActionVec{0, 0});
  CHECK_FALSE(tr.contact);
  CHECK(tr.reward == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("zero action at rest leaves the position unchanged") {
  const MazeWorld w = OpenMaze(RewardMode::kDense);
  const StateVec s = At(0.4, 0.6);
  const Transition tr = w.Step(s, ActionVec{0, 0});
  CHECK(tr.next[MazeWorld::kX] == s[MazeWorld::kX]);
  CHECK(tr.next[MazeWorld::kY] == s[MazeWorld::kY]);
  CHECK(tr.reward == doctest::Approx(-std::hypot(0.4, 0.1)));
}

TEST_CASE("sparse maze: inside the goal with wall contact pays zero") {
  MazeParams p;
  p.reward_mode = RewardMode::kSparse;
  // wall just right of the goal centre
  const MazeWorld w(MazeLayout{{Rect{0.83, 0.0, 0.87, 1.0}}, {{{0.2, 0.5}, {0.8, 0.5}}}}, p);
  const Transition tr = w.Step(At(0.82, 0.5, 1.0, 0.0), ActionVec{1, 0});
  CHECK(tr.contact);
  CHECK(tr.reward == 0.0);
  // pushed back: x unchanged, vx zeroed
  CHECK(tr.next[MazeWorld::kX] == 0.82);
  CHECK(tr.next[MazeWorld::kVx] == 0.0);
  const Transition free = w.Step(At(0.8, 0.5), ActionVec{0, 0});
  CHECK(free.reward == 1.0);
}

TEST_CASE("walls are never entered") {
  MazeParams p;
  const MazeWorld w(MazeLayout{{Rect{0.45, 0.2, 0.55, 0.8}}, {{{0.2, 0.5}, {0.8, 0.5}}}}, p);
  StateVec s = w.InitialState();
  for (const ActionVec& a : RandomActions(2000, 4)) {
    s = w.Step(s, a).next;
    CHECK_FALSE(w.Blocked(s[0], s[1]));
  }
}

TEST_CASE("out-of-bound actions are clamped and flagged") {
  const MazeWorld w = OpenMaze(RewardMode::kDense);
  const Transition big = w.Step(At(0.5, 0.5), ActionVec{3.0, -2.0});
  const Transition unit = w.Step(At(0.5, 0.5), ActionVec{1.0, -1.0});
  CHECK(big.clamped);
  CHECK_FALSE(unit.clamped);
  CHECK(big.next == unit.next);
}

TEST_CASE("goal swaps after 50 consecutive in-goal steps") {
  MazeParams p;
  p.swap_after = 50;
  const MazeWorld w(MazeLayout{{}, {{{0.2, 0.5}, {0.8, 0.5}}}}, p);
  StateVec s = At(0.8, 0.5);
  for (int i = 0; i < 49; ++i) s = w.Step(s, ActionVec{0, 0}).next;
  CHECK(s[MazeWorld::kGoal] == 1.0);
  s = w.Step(s, ActionVec{0, 0}).next;
  CHECK(s[MazeWorld::kGoal] == 0.0);
  CHECK(s[MazeWorld::kDwell] == 0.0);
}

TEST_CASE("goal stays put by default") {
  const MazeWorld w = OpenMaze(RewardMode::kDense);
  StateVec s = At(0.8, 0.5);
  for (int i = 0; i < 500; ++i) s = w.Step(s, ActionVec{0, 0}).next;
  CHECK(s[MazeWorld::kGoal] == 1.0);
  CHECK(s[MazeWorld::kDwell] == 500.0);
}

TEST_CASE("maze reward bounds") {
  for (RewardMode mode : {RewardMode::kDense, RewardMode::kSparse}) {
    const auto sched = ScheduleMazeWorlds(ScheduleKind::kChangingWorlds, 100, 3, 17);
    const auto& layout = dynamic_cast<const MazeWorld&>(*sched.entries[1].world).layout();
    MazeParams p;
    p.reward_mode = mode;
    const MazeWorld w(layout, p);
    StateVec s = w.InitialState();
    for (const ActionVec& a : RandomActions(3000, 9)) {
      const Transition tr = w.Step(s, a);
      if (mode == RewardMode::kDense) {
        CHECK(tr.reward <= 0.0);
        CHECK(tr.reward >= -(MazeWorld::Diameter() + 1.0));
      } else {
        CHECK((tr.reward == -1.0 || tr.reward == 0.0 || tr.reward == 1.0));
      }
      s = tr.next;
    }
  }
}

TEST_CASE("model rollout: empty sequence keeps only the start") {
  const MazeWorld w = OpenMaze(RewardMode::kDense);
  const Trajectory t = ModelRollout(w, At(0.1, 0.1), {});
  CHECK(t.states.size() == 1);
  CHECK(t.actions.empty());
  CHECK(t.rewards.empty());
}

TEST_CASE("model rollouts and real steps agree bitwise in a frozen world") {
  const auto sched = ScheduleMazeWorlds(ScheduleKind::kChangingWorlds, 1000000, 1, 3);
  const auto& maze = dynamic_cast<const MazeWorld&>(*sched.entries[0].world);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    LifelongEnv env(sched, maze.InitialState());
    const auto actions = RandomActions(64, seed);
    const Trajectory t = ModelRollout(*env.model(), env.state(), actions);
    for (int k = 0; k < 64; ++k) {
      const StepRecord r = env.Step(actions[k]);
      CHECK(r.reward == t.rewards[k]);
      CHECK(env.state() == t.states[k + 1]);
    }
  }
}

TEST_CASE("model rollout uses only the current world") {
  auto sched = ScheduleMazeWorlds(ScheduleKind::kChangingWorlds, 10, 3, 5);
  const auto& maze = dynamic_cast<const MazeWorld&>(*sched.entries[0].world);
  LifelongEnv env(sched, maze.InitialState());
  const EnvModel snapshot = env.model();
  const auto actions = RandomActions(40, 1);
  const Trajectory planned = ModelRollout(*snapshot, env.state(), actions);
  const Trajectory again = ModelRollout(*sched.entries[0].world, env.state(), actions);
  CHECK(planned.rewards == again.rewards);
  // the real environment is untouched by the rollout
  CHECK(env.clock() == 0);
  CHECK(env.state() == maze.InitialState());
  for (int k = 0; k < 10; ++k) env.Step(actions[k]);
  CHECK(env.world_index() == 1);
  CHECK(env.model().get() == sched.entries[1].world.get());
  CHECK(snapshot.get() == sched.entries[0].world.get());
}

TEST_CASE("world changes apply at the start of their timestep") {
  const auto sched = ScheduleMazeWorlds(ScheduleKind::kChangingWorlds, 5, 2, 8);
  const auto& maze = dynamic_cast<const MazeWorld&>(*sched.entries[0].world);
  LifelongEnv env(sched, maze.InitialState());
  for (int k = 0; k < 4; ++k) {
    CHECK(env.Step(ActionVec{0, 0}).world_index == 0);
  }
  const double goal_before = env.state()[MazeWorld::kGoal];
  const StepRecord last = env.Step(ActionVec{0, 0});
  CHECK(last.world_index == 0);
  CHECK(env.clock() == 5);
  CHECK(env.world_index() == 1);
  // CW switches the goal as well
  CHECK(env.state()[MazeWorld::kGoal] != goal_before);
}

TEST_CASE("NS schedule keeps walls and moves goals") {
  const auto s = ScheduleMazeWorlds(ScheduleKind::kNovelStates, 1000, 5, 21);
  REQUIRE(s.entries.size() == 5);
  const auto& first = dynamic_cast<const MazeWorld&>(*s.entries[0].world).layout();
  bool goals_moved = false;
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(s.entries[i].timestep == static_cast<std::int64_t>(i) * 1000);
    const auto& li = dynamic_cast<const MazeWorld&>(*s.entries[i].world).layout();
    CHECK(li.walls == first.walls);
    goals_moved |= !(li.goals == first.goals);
    CHECK(GoalsConnected(li));
  }
  CHECK(goals_moved);
}

TEST_CASE("CW schedule regenerates walls every period") {
  const auto s = ScheduleMazeWorlds(ScheduleKind::kChangingWorlds, 1000, 6, 2);
  for (std::size_t i = 1; i < s.entries.size(); ++i) {
    const auto& a = dynamic_cast<const MazeWorld&>(*s.entries[i - 1].world).layout();
    const auto& b = dynamic_cast<const MazeWorld&>(*s.entries[i].world).layout();
    CHECK_FALSE(a.walls == b.walls);
    CHECK(a.goals == b.goals);
    CHECK(GoalsConnected(b));
    CHECK(s.entries[i].task_switch);
  }
}

TEST_CASE("schedules are seed-deterministic and round-trip through JSON") {
  const auto a = ScheduleMazeWorlds(ScheduleKind::kChangingWorlds, 500, 4, 99);
  const auto b = ScheduleMazeWorlds(ScheduleKind::kChangingWorlds, 500, 4, 99);
  CHECK(a.ToJson().dump() == b.ToJson().dump());
  const auto back = WorldSchedule::FromJson(nlohmann::json::parse(a.ToJson().dump()));
  CHECK(back.ToJson().dump() == a.ToJson().dump());
  const auto c = ScheduleMazeWorlds(ScheduleKind::kChangingWorlds, 500, 4, 100);
  CHECK(c.ToJson().dump() != a.ToJson().dump());
  CHECK_THROWS_AS(ScheduleMazeWorlds(ScheduleKind::kChangingWorlds, 0, 4, 1), Error);
}

TEST_CASE("CW observations carry no world identity") {
  const auto s = ScheduleMazeWorlds(ScheduleKind::kChangingWorlds, 100, 4, 6);
  const StateVec st = At(0.33, 0.44, 0.1, -0.2, 1);
  std::array<double, 4> first{}, other{};
  s.entries[0].world->Observe(st, first);
  for (const auto& e : s.entries) {
    e.world->Observe(st, other);
    CHECK(other == first);
  }
}

TEST_CASE("sink chain: overspeeding caps reward for the recovery period") {
  SinkChainParams p;
  p.target_velocity = 2.0;
  const SinkChainWorld w(p);
  StateVec s{};
  double best = -1e9;
  // full throttle: +1 velocity per step, falls once |v| > 4
  int fell_at = -1;
  for (int k = 0; k < 10 && fell_at < 0; ++k) {
    const Transition tr = w.Step(s, ActionVec{1.0, 0});
    s = tr.next;
    if (s[SinkChainWorld::kFallen] > 0) fell_at = k;
  }
  REQUIRE(fell_at == 4);
  for (int k = 0; k < p.recover_steps; ++k) {
    const Transition tr = w.Step(s, ActionVec{0.0, 0});
    best = std::max(best, tr.reward);
    s = tr.next;
  }
  CHECK(best == -(p.target_velocity + 1.0));
  CHECK(best < -p.action_cost);  // below the optimum of 0
  CHECK(s[SinkChainWorld::kFallen] == 0.0);
  const Transition ok = w.Step(s, ActionVec{0.1, 0});
  CHECK(ok.reward > best);
}

TEST_CASE("sink chain schedule cycles targets and hides them in CW") {
  const auto cw = ScheduleSinkChain(ScheduleKind::kChangingWorlds, 100, 6, 4);
  const auto ns = ScheduleSinkChain(ScheduleKind::kNovelStates, 100, 6, 4);
  CHECK(cw.entries[0].world->observation_dim() == 2);
  CHECK(ns.entries[0].world->observation_dim() == 3);
  for (std::size_t i = 1; i < cw.entries.size(); ++i) {
    const auto& a = dynamic_cast<const SinkChainWorld&>(*cw.entries[i - 1].world);
    const auto& b = dynamic_cast<const SinkChainWorld&>(*cw.entries[i].world);
    CHECK(a.params().target_velocity != b.params().target_velocity);
    const double t = b.params().target_velocity;
    CHECK((t == 1.0 || t == 2.0 || t == 3.0));
  }
}

TEST_CASE("worlds round-trip through JSON") {
  const auto s = ScheduleMazeWorlds(ScheduleKind::kChangingWorlds, 100, 2, 12);
  for (const auto& e : s.entries) {
    const EnvModel back = WorldFromJson(e.world->ToJson());
    const auto actions = RandomActions(30, 2);
    const StateVec start = dynamic_cast<const MazeWorld&>(*e.world).InitialState();
    CHECK(ModelRollout(*back, start, actions).rewards ==
          ModelRollout(*e.world, start, actions).rewards);
  }
  CHECK_THROWS_AS(WorldFromJson(nlohmann::json{{"kind", "cube"}}), Error);
}

}  // namespace
}  // namespace aop
