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

#ifndef AOP_PRIORS_H_
#define AOP_PRIORS_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "aop/mlp.h"
#include "aop/planner.h"
#include "aop/replay.h"

namespace aop {

struct BcConfig {
  std::vector<int> hidden = {64, 64};
  AdamConfig adam;
};

// Behavior cloning: regresses planner actions on observations with MSE.
class BcPrior final : public PolicyPrior {
 public:
  BcPrior(int observation_dim, int action_dim, double action_bound,
          BcConfig config, std::uint64_t seed);

  // Network output clamped to the action bounds.
  ActionVec Act(std::span<const double> obs) const override;

  // Returns the mean loss of the last step (0 when steps == 0).
  double Update(const PolicyBuffer& buffer, int steps, int batch_size);

  const Mlp& network() const { return net_; }
  nlohmann::json ToJson() const;

 private:
  int obs_dim_;
  int action_dim_;
  double bound_;
  Mlp net_;
  Adam adam_;
  std::mt19937_64 rng_;
};

struct Td3Config {
  std::vector<int> hidden = {64, 64};
  AdamConfig adam;
  double gamma = 0.99;
  double target_noise = 0.2;
  double target_noise_clip = 0.5;
  int policy_delay = 2;
  double tau = 0.005;  // soft target update rate
};

// Twin-critic delayed deterministic actor-critic. The actor output passes
// through tanh and is scaled to the action bound.
class Td3Prior final : public PolicyPrior {
 public:
  Td3Prior(int observation_dim, int action_dim, double action_bound,
           Td3Config config, std::uint64_t seed);

  ActionVec Act(std::span<const double> obs) const override;
  double Q1(std::span<const double> obs, const ActionVec& action) const;

  struct Losses {
    double critic = 0.0;
    double actor = 0.0;
  };
  // Requires buffer.size() >= batch_size.
  Losses Update(const PolicyBuffer& buffer, int steps, int batch_size);

  const Mlp& actor() const { return actor_; }
  const Mlp& actor_target() const { return actor_target_; }
  const Mlp& critic1() const { return critic1_; }
  const Mlp& critic1_target() const { return critic1_target_; }
  std::uint64_t total_steps() const { return total_steps_; }
  nlohmann::json ToJson() const;

 private:
  Batch ActorForward(const Mlp& net, const Batch& obs, Mlp::Tape* tape) const;

  int obs_dim_;
  int action_dim_;
  double bound_;
  Td3Config config_;
  Mlp actor_, actor_target_;
  Mlp critic1_, critic1_target_;
  Mlp critic2_, critic2_target_;
  Adam actor_opt_, critic1_opt_, critic2_opt_;
  std::mt19937_64 rng_;
  std::uint64_t total_steps_ = 0;
};

}  // namespace aop

#endif  // AOP_PRIORS_H_
