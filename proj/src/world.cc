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

#include "aop/world.h"

#include <algorithm>
#include <string>

#include "aop/errors.h"
#include "aop/maze.h"
#include "aop/sink_chain.h"
#include "aop/trajectory.h"

namespace aop {

bool ClampAction(ActionVec& action, int action_dim, double bound) {
  bool clamped = false;
  for (int i = 0; i < action_dim; ++i) {
    const double c = std::clamp(action[i], -bound, bound);
    if (c != action[i]) clamped = true;
    action[i] = c;
  }
  return clamped;
}

EnvModel WorldFromJson(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "maze") {
      MazeLayout layout;
      for (const auto& w : j.at("walls")) {
        layout.walls.push_back({w.at(0).get<double>(), w.at(1).get<double>(),
                                w.at(2).get<double>(), w.at(3).get<double>()});
      }
      const auto& g = j.at("goals");
      for (int i = 0; i < 2; ++i) {
        layout.goals[i] = {g.at(i).at(0).get<double>(),
                           g.at(i).at(1).get<double>()};
      }
      MazeParams p;
      p.dt = j.at("dt").get<double>();
      p.velocity_limit = j.at("velocity_limit").get<double>();
      p.action_bound = j.at("action_bound").get<double>();
      p.goal_radius = j.at("goal_radius").get<double>();
      p.swap_after = j.at("swap_after").get<int>();
      p.reward_mode = j.at("reward_mode").get<std::string>() == "sparse"
                          ? RewardMode::kSparse
                          : RewardMode::kDense;
      return std::make_shared<const MazeWorld>(std::move(layout), p);
    }
    if (kind == "sink_chain") {
      SinkChainParams p;
      p.target_velocity = j.at("target_velocity").get<double>();
      p.dt = j.at("dt").get<double>();
      p.acceleration = j.at("acceleration").get<double>();
      p.fail_velocity = j.at("fail_velocity").get<double>();
      p.recover_steps = j.at("recover_steps").get<int>();
      p.action_cost = j.at("action_cost").get<double>();
      p.observation = j.at("observation").get<std::string>() == "novel_states"
                          ? ObservationMode::kNovelStates
                          : ObservationMode::kChangingWorlds;
      return std::make_shared<const SinkChainWorld>(p);
    }
    throw Error(ErrorCode::kParse, "unknown world kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("WorldFromJson: ") + e.what());
  }
}

Trajectory ModelRollout(const World& world, const StateVec& start,
                        std::span<const ActionVec> actions) {
  Trajectory traj;
  traj.states.reserve(actions.size() + 1);
  traj.rewards.reserve(actions.size());
  traj.actions.assign(actions.begin(), actions.end());
  traj.states.push_back(start);
  for (const ActionVec& a : actions) {
    const Transition tr = world.Step(traj.states.back(), a);
    traj.states.push_back(tr.next);
    traj.rewards.push_back(tr.reward);
    traj.contacts += tr.contact ? 1 : 0;
  }
  return traj;
}

Batch ObservationBatch(const World& world, std::span<const StateVec> states) {
  const int dim = world.observation_dim();
  Batch out(static_cast<Eigen::Index>(states.size()), dim);
  for (std::size_t i = 0; i < states.size(); ++i) {
    world.Observe(states[i], std::span<double>(out.row(i).data(), dim));
  }
  return out;
}

double DiscountedReturn(std::span<const double> rewards, double gamma) {
  double total = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    total += discount * r;
    discount *= gamma;
  }
  return total;
}

}  // namespace aop
