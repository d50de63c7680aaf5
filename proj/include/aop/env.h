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

#ifndef AOP_ENV_H_
#define AOP_ENV_H_

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "aop/maze.h"
#include "aop/sink_chain.h"
#include "aop/world.h"

namespace aop {

enum class ScheduleKind { kNovelStates, kChangingWorlds };

struct ScheduleEntry {
  std::int64_t timestep = 0;
  EnvModel world;
  // also switch the task inside the state (maze goal swap)
  bool task_switch = false;
};

// Ordered change points; the first entry is always at timestep 0.
struct WorldSchedule {
  std::vector<ScheduleEntry> entries;

  nlohmann::json ToJson() const;
  static WorldSchedule FromJson(const nlohmann::json& j);
};

// NS: walls fixed, a fresh pair of goals every period.
// CW: goals fixed, walls regenerated and goal swapped every period.
WorldSchedule ScheduleMazeWorlds(ScheduleKind kind, std::int64_t period,
                                 int count, std::uint64_t seed,
                                 MazeParams params = {},
                                 MazeGenOptions options = {});

// Target velocity cycles through {1, 2, 3} in a seeded order every period.
WorldSchedule ScheduleSinkChain(ScheduleKind kind, std::int64_t period,
                                int count, std::uint64_t seed,
                                SinkChainParams params = {});

struct StepRecord {
  double reward = 0.0;
  bool contact = false;
  bool clamped = false;
  // index of the world that produced this transition
  int world_index = 0;
};

// Reset-free environment. The only way to change the state is Step; there is
// deliberately no reset or restore.
class LifelongEnv {
 public:
  LifelongEnv(WorldSchedule schedule, const StateVec& initial_state);

  StepRecord Step(const ActionVec& action);

  // Snapshot of the current (T, R); unaffected by later world changes.
  const EnvModel& model() const { return model_; }
  const StateVec& state() const { return state_; }
  std::int64_t clock() const { return clock_; }
  int world_index() const { return world_index_; }
  int observation_dim() const { return model_->observation_dim(); }
  int action_dim() const { return model_->action_dim(); }
  void Observe(std::span<double> out) const { model_->Observe(state_, out); }
  const WorldSchedule& schedule() const { return schedule_; }

 private:
  void ApplyScheduledChange();

  WorldSchedule schedule_;
  EnvModel model_;
  StateVec state_;
  std::int64_t clock_ = 0;
  int world_index_ = 0;
  std::size_t next_entry_ = 0;
};

}  // namespace aop

#endif  // AOP_ENV_H_
