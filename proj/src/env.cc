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

#include "aop/env.h"

#include <algorithm>
#include <random>
#include <utility>

#include "aop/errors.h"

namespace aop {

nlohmann::json WorldSchedule::ToJson() const {
  nlohmann::json out = nlohmann::json::array();
  for (const ScheduleEntry& e : entries) {
    out.push_back({{"timestep", e.timestep},
                   {"task_switch", e.task_switch},
                   {"world", e.world->ToJson()}});
  }
  return {{"format", "aop-schedule"}, {"version", 1}, {"entries", out}};
}

WorldSchedule WorldSchedule::FromJson(const nlohmann::json& j) {
  WorldSchedule schedule;
  try {
    for (const auto& e : j.at("entries")) {
      schedule.entries.push_back({e.at("timestep").get<std::int64_t>(),
                                  WorldFromJson(e.at("world")),
                                  e.at("task_switch").get<bool>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("WorldSchedule: ") + e.what());
  }
  return schedule;
}

namespace {

void CheckPeriod(std::int64_t period, int count) {
  if (period <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "schedule period must be > 0");
  }
  if (count <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "schedule count must be > 0");
  }
}

Point2 RandomGoal(std::mt19937_64& rng, double lo_x, double hi_x) {
  std::uniform_real_distribution<double> x(lo_x, hi_x);
  std::uniform_real_distribution<double> y(0.15, 0.85);
  const double gx = x(rng);
  return {gx, y(rng)};
}

}  // namespace

WorldSchedule ScheduleMazeWorlds(ScheduleKind kind, std::int64_t period,
                                 int count, std::uint64_t seed,
                                 MazeParams params, MazeGenOptions options) {
  CheckPeriod(period, count);
  std::mt19937_64 rng(seed);
  WorldSchedule schedule;
  if (kind == ScheduleKind::kChangingWorlds) {
    const std::array<Point2, 2> goals = {RandomGoal(rng, 0.1, 0.3),
                                         RandomGoal(rng, 0.7, 0.9)};
    for (int i = 0; i < count; ++i) {
      MazeLayout layout{GenerateWalls(goals, options, rng()), goals};
      schedule.entries.push_back(
          {i * period,
           std::make_shared<const MazeWorld>(std::move(layout), params),
           i > 0});
    }
  } else {
    std::array<Point2, 2> goals = {RandomGoal(rng, 0.1, 0.3),
                                   RandomGoal(rng, 0.7, 0.9)};
    const std::vector<Rect> walls = GenerateWalls(goals, options, rng());
    for (int i = 0; i < count; ++i) {
      if (i > 0) {
        // new goals must stay reachable inside the fixed walls
        for (int attempt = 0;; ++attempt) {
          goals = {RandomGoal(rng, 0.1, 0.9), RandomGoal(rng, 0.1, 0.9)};
          MazeWorld probe(MazeLayout{walls, goals}, params);
          const bool clear = !probe.Blocked(goals[0].x, goals[0].y) &&
                             !probe.Blocked(goals[1].x, goals[1].y);
          const double sep =
              std::hypot(goals[0].x - goals[1].x, goals[0].y - goals[1].y);
          if (clear && sep > 0.5 &&
              GoalsConnected(MazeLayout{walls, goals}, options.grid)) {
            break;
          }
          if (attempt > 10000) {
            throw Error(ErrorCode::kInvalidArgument,
                        "ScheduleMazeWorlds: cannot place goals");
          }
        }
      }
      schedule.entries.push_back(
          {i * period,
           std::make_shared<const MazeWorld>(MazeLayout{walls, goals}, params),
           false});
    }
  }
  return schedule;
}

WorldSchedule ScheduleSinkChain(ScheduleKind kind, std::int64_t period,
                                int count, std::uint64_t seed,
                                SinkChainParams params) {
  CheckPeriod(period, count);
  std::mt19937_64 rng(seed);
  params.observation = kind == ScheduleKind::kNovelStates
                           ? ObservationMode::kNovelStates
                           : ObservationMode::kChangingWorlds;
  WorldSchedule schedule;
  double previous = 0.0;
  for (int i = 0; i < count; ++i) {
    double target = previous;
    while (target == previous) {
      target = static_cast<double>(1 + static_cast<int>(rng() % 3));
    }
    previous = target;
    params.target_velocity = target;
    schedule.entries.push_back(
        {i * period, std::make_shared<const SinkChainWorld>(params), false});
  }
  return schedule;
}

LifelongEnv::LifelongEnv(WorldSchedule schedule, const StateVec& initial_state)
    : schedule_(std::move(schedule)), state_(initial_state) {
  if (schedule_.entries.empty() || schedule_.entries.front().timestep != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "LifelongEnv: schedule must start at timestep 0");
  }
  for (std::size_t i = 1; i < schedule_.entries.size(); ++i) {
    if (schedule_.entries[i].timestep <= schedule_.entries[i - 1].timestep) {
      throw Error(ErrorCode::kInvalidArgument,
                  "LifelongEnv: schedule timesteps must increase");
    }
  }
  model_ = schedule_.entries.front().world;
  next_entry_ = 1;
}

StepRecord LifelongEnv::Step(const ActionVec& action) {
  const Transition tr = model_->Step(state_, action);
  StepRecord rec{tr.reward, tr.contact, tr.clamped, world_index_};
  state_ = tr.next;
  ++clock_;
  ApplyScheduledChange();
  return rec;
}

// Changes take effect at the start of their timestep, before the agent plans.
void LifelongEnv::ApplyScheduledChange() {
  while (next_entry_ < schedule_.entries.size() &&
         schedule_.entries[next_entry_].timestep <= clock_) {
    const ScheduleEntry& e = schedule_.entries[next_entry_];
    model_ = e.world;
    state_ = model_->Admit(state_, e.task_switch);
    world_index_ = static_cast<int>(next_entry_);
    ++next_entry_;
  }
}

}  // namespace aop
