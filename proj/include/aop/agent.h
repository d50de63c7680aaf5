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

#ifndef AOP_AGENT_H_
#define AOP_AGENT_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aop/env.h"
#include "aop/planner.h"
#include "aop/priors.h"
#include "aop/replay.h"
#include "aop/value_ensemble.h"

namespace aop {

enum class AgentMode { kAopTd3, kAopBc, kPolo, kMpc8, kMpc3, kTd3Only };

const char* AgentModeName(AgentMode mode);
std::optional<AgentMode> ParseAgentMode(const std::string& name);

// MPC-8 budget per environment step: 8 iterations x 40 rollouts x 80 steps.
inline constexpr double kMpc8TimestepsPerStep = 8.0 * 40.0 * 80.0;

struct AgentConfig {
  AgentMode mode = AgentMode::kAopBc;
  double gamma = 0.99;
  PlannerConfig planner;
  HorizonConfig horizon;
  EnsembleConfig ensemble;
  BcConfig bc;
  Td3Config td3;
  int update_every = 4;
  int value_steps = 32;
  int value_batch = 32;
  int bc_steps = 400;
  int bc_batch = 64;
  int td3_steps = 128;
  int td3_batch = 100;
  std::size_t value_capacity = 100000;
  std::size_t policy_capacity = 100000;
  std::uint64_t seed = 0;

  // Defaults for `mode`, including the fixed-compute baselines:
  //   POLO      value ensemble, H = 80, 3 iterations, no prior
  //   MPC-k     zero terminal value, H = 80, k iterations, no prior
  //   TD3-only  one noisy 256-step policy rollout per step, no planner search
  static AgentConfig ForMode(AgentMode mode);

  bool uses_ensemble() const;
  bool uses_bc() const { return mode == AgentMode::kAopBc; }
  bool uses_td3() const {
    return mode == AgentMode::kAopTd3 || mode == AgentMode::kTd3Only;
  }
  void Validate() const;
};

struct StepLog {
  std::int64_t t = 0;
  double reward = 0.0;
  std::int64_t rolled_timesteps = 0;
  int horizon = 0;
  int iterations = 0;
  double sigma = 0.0;
  double bellman_error = 0.0;
  int world_index = 0;
  bool contact = false;
  bool clamped = false;
  PlanSource source = PlanSource::kNone;
  double plan_return = 0.0;
  std::vector<double> deltas;
  ActionVec action{};
  StateVec state{};
  // raw successor from the world that produced the step (before any world
  // change is applied)
  StateVec next_state{};

  nlohmann::json ToJson() const;
  static StepLog FromJson(const nlohmann::json& j);
};

struct LifetimeLog {
  std::vector<StepLog> steps;
  // empty on success; otherwise the error that aborted the run (steps holds
  // the partial log)
  std::string error;

  bool ok() const { return error.empty(); }
};

// The AOP lifelong agent: prior proposal, plan-source argmax, adaptive
// horizon, MPPI with early termination, model-free updates, then act.
class Agent {
 public:
  Agent(AgentConfig cfg, int observation_dim, int action_dim,
        double action_bound);

  StepLog Step(LifelongEnv& env);

  const AgentConfig& config() const { return cfg_; }
  const PolicyPrior* prior() const;
  const ValueEnsemble* ensemble() const { return ensemble_.get(); }
  const BcPrior* bc() const { return bc_.get(); }
  const Td3Prior* td3() const { return td3_.get(); }
  const ValueBuffer& value_buffer() const { return value_buffer_; }
  const PolicyBuffer& policy_buffer() const { return policy_buffer_; }

 private:
  void Learn();
  void StoreTransitions(const World& world, const Trajectory& traj, int steps);

  AgentConfig cfg_;
  int obs_dim_;
  int action_dim_;
  Planner planner_;
  std::unique_ptr<ValueEnsemble> ensemble_;
  std::unique_ptr<BcPrior> bc_;
  std::unique_ptr<Td3Prior> td3_;
  ValueBuffer value_buffer_;
  PolicyBuffer policy_buffer_;
};

// Called after every environment step with the agent and its environment.
using StepObserver =
    std::function<void(const Agent&, const LifelongEnv&, const StepLog&)>;

// Runs exactly `total_steps` environment steps (fewer only if a component
// fails, in which case the log carries the error).
LifetimeLog RunLifetime(LifelongEnv& env, const AgentConfig& cfg,
                        std::int64_t total_steps,
                        const StepObserver& observer = nullptr);

// Sum of planner-rolled timesteps over (steps * MPC-8 budget).
double PlanningFraction(const LifetimeLog& log);
double AverageLifetimeReward(const LifetimeLog& log);

}  // namespace aop

#endif  // AOP_AGENT_H_
