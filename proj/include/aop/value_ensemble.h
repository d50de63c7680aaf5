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

#ifndef AOP_VALUE_ENSEMBLE_H_
#define AOP_VALUE_ENSEMBLE_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "aop/mlp.h"
#include "aop/replay.h"
#include "aop/trajectory.h"

namespace aop {

struct EnsembleConfig {
  int size = 6;
  double kappa = 1e-2;
  double gamma = 0.99;
  std::vector<int> hidden = {64, 64};
  // bootstrapping depth of the regression target
  int n_step = 32;
  AdamConfig adam;
};

// (1/kappa) * log(mean_i exp(kappa * v_i)), evaluated with the max shifted
// out. Always lies in [mean, max].
double LogSumExpAggregate(std::span<const double> values, double kappa);
// population convention (divide by n)
double PopulationStd(std::span<const double> values);
double Mean(std::span<const double> values);

// Squared Bellman errors for every split point H = 0..H_full of a length
// H_full trajectory:
//   eps(H) = (sum_{k=H}^{H_full-1} gamma^(k-H) r_k
//             + gamma^(H_full-H) * terminal_aggregate - mean_values[H])^2
// `mean_values[k]` is the ensemble-mean value at state k (size H_full + 1).
std::vector<double> BellmanErrorProfile(std::span<const double> rewards,
                                        std::span<const double> mean_values,
                                        double terminal_aggregate,
                                        double gamma);

class ValueEnsemble {
 public:
  ValueEnsemble(int observation_dim, EnsembleConfig config, std::uint64_t seed);
  // Wraps existing members (used by checkpoints and tests).
  ValueEnsemble(std::vector<Mlp> members, EnsembleConfig config,
                std::uint64_t seed = 0);

  int size() const { return static_cast<int>(members_.size()); }
  int observation_dim() const { return members_.front().input_size(); }
  const EnsembleConfig& config() const { return config_; }
  const std::vector<Mlp>& members() const { return members_; }

  void MemberValues(std::span<const double> obs, std::span<double> out) const;
  // (batch x n) matrix of member values for a batch of observations.
  Eigen::MatrixXd MemberValues(const Batch& obs) const;

  double Aggregate(std::span<const double> obs) const;
  double EnsembleStd(std::span<const double> obs) const;
  double MeanValue(std::span<const double> obs) const;

  // eps(H | traj) for one H in [0, h_full]; traj must have >= h_full steps.
  double BellmanError(const World& world, const Trajectory& traj, int h,
                      int h_full) const;
  // All of eps(0..h_full | traj) at once.
  std::vector<double> BellmanErrors(const World& world, const Trajectory& traj,
                                    int h_full) const;

  // Each member takes `steps` Adam steps on its own uniformly sampled
  // minibatches. Target: n-step discounted reward sum along the stored
  // experience sequence plus the discounted value of a lagged copy of the
  // member, refreshed at the start of every call. Throws kNonFinite on
  // divergence and kInvalidArgument on an empty buffer.
  void Train(const ValueBuffer& buffer, int steps, int batch_size);

  nlohmann::json ToJson() const;
  static ValueEnsemble FromJson(const nlohmann::json& j);

 private:
  EnsembleConfig config_;
  std::vector<Mlp> members_;
  std::vector<Adam> optimizers_;
  std::mt19937_64 rng_;
};

}  // namespace aop

#endif  // AOP_VALUE_ENSEMBLE_H_
