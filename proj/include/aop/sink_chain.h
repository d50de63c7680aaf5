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

#ifndef AOP_SINK_CHAIN_H_
#define AOP_SINK_CHAIN_H_

#include "aop/world.h"

namespace aop {

struct SinkChainParams {
  double target_velocity = 1.0;
  double dt = 0.05;
  // velocity change per unit action per second
  double acceleration = 20.0;
  // |velocity| above this knocks the agent over
  double fail_velocity = 4.0;
  int recover_steps = 100;
  double action_cost = 0.1;
  ObservationMode observation = ObservationMode::kChangingWorlds;
};

// 1D velocity-tracking task with a pseudo-terminal sink. Overspeeding puts
// the agent into a fallen phase lasting recover_steps, during which actions
// have no effect and every reward is -(target + 1), strictly worse than
// standing still.
//
// State: [position, velocity, fallen_steps_remaining].
// Observation: [velocity, fallen fraction] plus the target velocity in
// novel-states mode.
class SinkChainWorld final : public World {
 public:
  enum StateIndex { kPos = 0, kVel, kFallen };

  explicit SinkChainWorld(SinkChainParams params);

  int action_dim() const override { return 1; }
  int observation_dim() const override {
    return params_.observation == ObservationMode::kNovelStates ? 3 : 2;
  }

  Transition Step(const StateVec& state,
                  const ActionVec& action) const override;
  void Observe(const StateVec& state, std::span<double> out) const override;
  StateVec Admit(const StateVec& state, bool task_switch) const override;
  nlohmann::json ToJson() const override;

  const SinkChainParams& params() const { return params_; }

 private:
  SinkChainParams params_;
};

}  // namespace aop

#endif  // AOP_SINK_CHAIN_H_
