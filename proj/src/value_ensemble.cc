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

#include "aop/value_ensemble.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aop/errors.h"

namespace aop {

double LogSumExpAggregate(std::span<const double> values, double kappa) {
  const double vmax = *std::max_element(values.begin(), values.end());
  // expm1/log1p keep precision in the small-kappa (mean) limit
  double sum = 0.0;
  for (double v : values) sum += std::expm1(kappa * (v - vmax));
  const double n = static_cast<double>(values.size());
  return vmax + std::log1p(sum / n) / kappa;
}

double Mean(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double PopulationStd(std::span<const double> values) {
  const double mean = Mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

std::vector<double> BellmanErrorProfile(std::span<const double> rewards,
                                        std::span<const double> mean_values,
                                        double terminal_aggregate,
                                        double gamma) {
  const std::size_t h_full = rewards.size();
  if (mean_values.size() != h_full + 1) {
    ThrowDimensionMismatch("BellmanErrorProfile mean_values",
                           static_cast<long>(h_full + 1),
                           static_cast<long>(mean_values.size()));
  }
  std::vector<double> eps(h_full + 1);
  double segment = terminal_aggregate;
  for (std::size_t h = h_full + 1; h-- > 0;) {
    if (h < h_full) segment = rewards[h] + gamma * segment;
    const double gap = segment - mean_values[h];
    eps[h] = gap * gap;
  }
  return eps;
}

ValueEnsemble::ValueEnsemble(int observation_dim, EnsembleConfig config,
                             std::uint64_t seed)
    : config_(std::move(config)), rng_(seed) {
  if (config_.size <= 0 || config_.kappa <= 0.0 || config_.gamma < 0.0 ||
      config_.gamma >= 1.0 || config_.n_step <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "ValueEnsemble: invalid config");
  }
  std::vector<int> sizes{observation_dim};
  sizes.insert(sizes.end(), config_.hidden.begin(), config_.hidden.end());
  sizes.push_back(1);
  for (int i = 0; i < config_.size; ++i) {
    members_.push_back(Mlp::Random(sizes, rng_));
    optimizers_.emplace_back(members_.back().parameter_count(), config_.adam);
  }
}

ValueEnsemble::ValueEnsemble(std::vector<Mlp> members, EnsembleConfig config,
                             std::uint64_t seed)
    : config_(std::move(config)), members_(std::move(members)), rng_(seed) {
  if (members_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "ValueEnsemble: no members");
  }
  config_.size = static_cast<int>(members_.size());
  for (const Mlp& m : members_) {
    if (m.output_size() != 1 || m.input_size() != members_[0].input_size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "ValueEnsemble: members must share input size and be scalar");
    }
    optimizers_.emplace_back(m.parameter_count(), config_.adam);
  }
}

void ValueEnsemble::MemberValues(std::span<const double> obs,
                                 std::span<double> out) const {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    out[i] = members_[i].Forward(obs)[0];
  }
}

Eigen::MatrixXd ValueEnsemble::MemberValues(const Batch& obs) const {
  Eigen::MatrixXd out(obs.rows(), size());
  for (int i = 0; i < size(); ++i) {
    out.col(i) = members_[i].Forward(obs).col(0);
  }
  return out;
}

double ValueEnsemble::Aggregate(std::span<const double> obs) const {
  std::vector<double> v(members_.size());
  MemberValues(obs, v);
  return LogSumExpAggregate(v, config_.kappa);
}

double ValueEnsemble::EnsembleStd(std::span<const double> obs) const {
  std::vector<double> v(members_.size());
  MemberValues(obs, v);
  return PopulationStd(v);
}

double ValueEnsemble::MeanValue(std::span<const double> obs) const {
  std::vector<double> v(members_.size());
  MemberValues(obs, v);
  return Mean(v);
}

std::vector<double> ValueEnsemble::BellmanErrors(const World& world,
                                                 const Trajectory& traj,
                                                 int h_full) const {
  if (h_full < 0 || traj.horizon() < h_full) {
    throw Error(ErrorCode::kOutOfRange,
                "BellmanErrors: trajectory shorter than H_full");
  }
  const Batch obs = ObservationBatch(
      world, std::span(traj.states.data(), static_cast<std::size_t>(h_full) + 1));
  const Eigen::MatrixXd values = MemberValues(obs);
  std::vector<double> means(static_cast<std::size_t>(h_full) + 1);
  for (int k = 0; k <= h_full; ++k) means[k] = values.row(k).mean();
  std::vector<double> last(values.cols());
  for (Eigen::Index i = 0; i < values.cols(); ++i) last[i] = values(h_full, i);
  const double terminal = LogSumExpAggregate(last, config_.kappa);
  return BellmanErrorProfile(
      std::span(traj.rewards.data(), static_cast<std::size_t>(h_full)), means,
      terminal, config_.gamma);
}

double ValueEnsemble::BellmanError(const World& world, const Trajectory& traj,
                                   int h, int h_full) const {
  if (h < 0 || h > h_full) {
    throw Error(ErrorCode::kOutOfRange,
                "BellmanError: H must lie in [0, H_full]");
  }
  return BellmanErrors(world, traj, h_full)[h];
}

void ValueEnsemble::Train(const ValueBuffer& buffer, int steps,
                          int batch_size) {
  if (steps <= 0) return;
  if (buffer.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "ValueEnsemble::Train: empty buffer");
  }
  const int dim = observation_dim();
  const std::size_t n = buffer.size();
  const double gamma = config_.gamma;
  const std::vector<Mlp> lagged = members_;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  Batch inputs(batch_size, dim);
  Batch boot_inputs(batch_size, dim);
  Vector partial(batch_size);
  Vector boot_discount(batch_size);
  Mlp::Tape tape;
  Vector grad;
  for (int m = 0; m < size(); ++m) {
    for (int step = 0; step < steps; ++step) {
      for (int b = 0; b < batch_size; ++b) {
        const std::size_t j = pick(rng_);
        const std::size_t k_eff =
            std::min<std::size_t>(config_.n_step, n - j);
        double ret = 0.0;
        double discount = 1.0;
        for (std::size_t k = 0; k < k_eff; ++k) {
          ret += discount * buffer[j + k].reward;
          discount *= gamma;
        }
        partial[b] = ret;
        boot_discount[b] = discount;
        const Experience& head = buffer[j];
        const Experience& tail = buffer[j + k_eff - 1];
        for (int d = 0; d < dim; ++d) {
          inputs(b, d) = head.obs[d];
          boot_inputs(b, d) = tail.next_obs[d];
        }
      }
      const Batch boot = lagged[m].Forward(boot_inputs);
      const Batch pred = members_[m].Forward(inputs, &tape);
      Batch upstream(batch_size, 1);
      for (int b = 0; b < batch_size; ++b) {
        const double target = partial[b] + boot_discount[b] * boot(b, 0);
        upstream(b, 0) = 2.0 * (pred(b, 0) - target) / batch_size;
      }
      grad.setZero(0);
      members_[m].Backward(tape, upstream, &grad);
      optimizers_[m].Step(members_[m].parameters(), {grad.data(),
                          static_cast<std::size_t>(grad.size())});
    }
  }
}

nlohmann::json ValueEnsemble::ToJson() const {
  nlohmann::json members = nlohmann::json::array();
  for (const Mlp& m : members_) members.push_back(m.ToJson());
  return {{"format", "aop-value-ensemble"},
          {"version", 1},
          {"kappa", config_.kappa},
          {"gamma", config_.gamma},
          {"n_step", config_.n_step},
          {"members", members}};
}

ValueEnsemble ValueEnsemble::FromJson(const nlohmann::json& j) {
  try {
    EnsembleConfig config;
    config.kappa = j.at("kappa").get<double>();
    config.gamma = j.at("gamma").get<double>();
    config.n_step = j.at("n_step").get<int>();
    std::vector<Mlp> members;
    for (const auto& m : j.at("members")) members.push_back(Mlp::FromJson(m));
    if (!members.empty()) {
      const auto& sizes = members.front().layer_sizes();
      config.hidden.assign(sizes.begin() + 1, sizes.end() - 1);
    }
    return ValueEnsemble(std::move(members), config);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("ValueEnsemble: ") + e.what());
  }
}

}  // namespace aop
