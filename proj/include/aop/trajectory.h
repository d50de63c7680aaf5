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

#ifndef AOP_TRAJECTORY_H_
#define AOP_TRAJECTORY_H_

#include <span>
#include <vector>

#include "aop/mlp.h"
#include "aop/world.h"

namespace aop {

// A model rollout: states.size() == actions.size() + 1 == rewards.size() + 1.
struct Trajectory {
  std::vector<StateVec> states;
  std::vector<ActionVec> actions;
  std::vector<double> rewards;
  int contacts = 0;
  // H-step discounted return plus discounted terminal value; set by the
  // scorer (see ScoreTrajectory in planner.h).
  double return_estimate = 0.0;
  double terminal_value = 0.0;

  int horizon() const { return static_cast<int>(actions.size()); }
};

// Rolls `actions` through `world` from `start`. The real environment is never
// involved.
Trajectory ModelRollout(const World& world, const StateVec& start,
                        std::span<const ActionVec> actions);

// One row per state: world.Observe(states[i]).
Batch ObservationBatch(const World& world, std::span<const StateVec> states);

// Discounted sum of rewards[begin, end) with discount restarting at `begin`.
double DiscountedReturn(std::span<const double> rewards, double gamma);

}  // namespace aop

#endif  // AOP_TRAJECTORY_H_
