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

#include "aop/sink_chain.h"

#include <cmath>

#include "aop/errors.h"

namespace aop {

SinkChainWorld::SinkChainWorld(SinkChainParams params) : params_(params) {
  if (params_.dt <= 0.0 || params_.fail_velocity <= 0.0 ||
      params_.recover_steps < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "SinkChainWorld: invalid parameters");
  }
}

Transition SinkChainWorld::Step(const StateVec& state,
                                const ActionVec& action) const {
  Transition tr;
  ActionVec a = action;
  tr.clamped = ClampAction(a, 1, action_bound());
  StateVec s = state;
  if (s[kFallen] > 0.0) {
    s[kFallen] -= 1.0;
    s[kVel] = 0.0;
    tr.reward = -(params_.target_velocity + 1.0);
    tr.next = s;
    return tr;
  }
  s[kVel] += params_.acceleration * a[0] * params_.dt;
  s[kPos] += s[kVel] * params_.dt;
  if (std::abs(s[kVel]) > params_.fail_velocity) {
    s[kVel] = 0.0;
    s[kFallen] = params_.recover_steps;
    tr.reward = -(params_.target_velocity + 1.0);
  } else {
    tr.reward = -std::abs(s[kVel] - params_.target_velocity) -
                params_.action_cost * a[0] * a[0];
  }
  tr.next = s;
  return tr;
}

void SinkChainWorld::Observe(const StateVec& state,
                             std::span<double> out) const {
  out[0] = state[kVel];
  out[1] = params_.recover_steps > 0
               ? state[kFallen] / params_.recover_steps
               : 0.0;
  if (params_.observation == ObservationMode::kNovelStates) {
    out[2] = params_.target_velocity;
  }
}

StateVec SinkChainWorld::Admit(const StateVec& state, bool) const {
  return state;
}

nlohmann::json SinkChainWorld::ToJson() const {
  return {
      {"kind", "sink_chain"},
      {"target_velocity", params_.target_velocity},
      {"dt", params_.dt},
      {"acceleration", params_.acceleration},
      {"fail_velocity", params_.fail_velocity},
      {"recover_steps", params_.recover_steps},
      {"action_cost", params_.action_cost},
      {"observation", params_.observation == ObservationMode::kNovelStates
                          ? "novel_states"
                          : "changing_worlds"},
  };
}

}  // namespace aop
