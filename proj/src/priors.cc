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

#include "aop/priors.h"

#include <algorithm>
#include <cmath>

#include "aop/errors.h"

namespace aop {

namespace {

std::vector<int> Sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

// Fresh policies start with a zero output layer so they emit zero actions.
void ZeroOutputLayer(Mlp& net) {
  const auto& sizes = net.layer_sizes();
  const std::size_t last =
      static_cast<std::size_t>(sizes[sizes.size() - 2] + 1) * sizes.back();
  auto params = net.parameters();
  std::fill(params.end() - static_cast<std::ptrdiff_t>(last), params.end(), 0.0);
}

std::span<const double> Span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void CheckFinite(double loss, const char* where) {
  if (!std::isfinite(loss)) {
    throw Error(ErrorCode::kNonFinite, std::string(where) + ": loss diverged");
  }
}

}  // namespace

BcPrior::BcPrior(int observation_dim, int action_dim, double action_bound,
                 BcConfig config, std::uint64_t seed)
    : obs_dim_(observation_dim),
      action_dim_(action_dim),
      bound_(action_bound),
      rng_(seed) {
  net_ = Mlp::Random(Sizes(obs_dim_, config.hidden, action_dim_), rng_);
  ZeroOutputLayer(net_);
  adam_ = Adam(net_.parameter_count(), config.adam);
}

ActionVec BcPrior::Act(std::span<const double> obs) const {
  const Vector out = net_.Forward(obs);
  ActionVec a{};
  for (int d = 0; d < action_dim_; ++d) {
    a[d] = std::clamp(out[d], -bound_, bound_);
  }
  return a;
}

double BcPrior::Update(const PolicyBuffer& buffer, int steps, int batch_size) {
  if (steps <= 0) return 0.0;
  if (buffer.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "BcPrior::Update: empty buffer");
  }
  std::uniform_int_distribution<std::size_t> pick(0, buffer.size() - 1);
  Batch obs(batch_size, obs_dim_);
  Batch target(batch_size, action_dim_);
  Mlp::Tape tape;
  Vector grad;
  double loss = 0.0;
  for (int step = 0; step < steps; ++step) {
    for (int b = 0; b < batch_size; ++b) {
      const Experience& e = buffer[pick(rng_)];
      for (int d = 0; d < obs_dim_; ++d) obs(b, d) = e.obs[d];
      for (int d = 0; d < action_dim_; ++d) target(b, d) = e.action[d];
    }
    const Batch pred = net_.Forward(obs, &tape);
    const Batch diff = pred - target;
    loss = diff.squaredNorm() / batch_size;
    CheckFinite(loss, "BcPrior::Update");
    const Batch upstream = (2.0 / batch_size) * diff;
    grad.setZero(0);
    net_.Backward(tape, upstream, &grad);
    adam_.Step(net_.parameters(), Span(grad));
  }
  return loss;
}

nlohmann::json BcPrior::ToJson() const {
  return {{"format", "aop-bc-prior"}, {"version", 1}, {"policy", net_.ToJson()}};
}

Td3Prior::Td3Prior(int observation_dim, int action_dim, double action_bound,
                   Td3Config config, std::uint64_t seed)
    : obs_dim_(observation_dim),
      action_dim_(action_dim),
      bound_(action_bound),
      config_(std::move(config)),
      rng_(seed) {
  actor_ = Mlp::Random(Sizes(obs_dim_, config_.hidden, action_dim_), rng_);
  ZeroOutputLayer(actor_);
  const auto critic_sizes = Sizes(obs_dim_ + action_dim_, config_.hidden, 1);
  critic1_ = Mlp::Random(critic_sizes, rng_);
  critic2_ = Mlp::Random(critic_sizes, rng_);
  actor_target_ = actor_;
  critic1_target_ = critic1_;
  critic2_target_ = critic2_;
  actor_opt_ = Adam(actor_.parameter_count(), config_.adam);
  critic1_opt_ = Adam(critic1_.parameter_count(), config_.adam);
  critic2_opt_ = Adam(critic2_.parameter_count(), config_.adam);
}

ActionVec Td3Prior::Act(std::span<const double> obs) const {
  const Vector z = actor_.Forward(obs);
  ActionVec a{};
  for (int d = 0; d < action_dim_; ++d) a[d] = bound_ * std::tanh(z[d]);
  return a;
}

double Td3Prior::Q1(std::span<const double> obs, const ActionVec& action) const {
  std::vector<double> in(obs.begin(), obs.end());
  in.insert(in.end(), action.begin(), action.begin() + action_dim_);
  return critic1_.Forward(in)[0];
}

Batch Td3Prior::ActorForward(const Mlp& net, const Batch& obs,
                             Mlp::Tape* tape) const {
  Batch z = net.Forward(obs, tape);
  return bound_ * z.array().tanh();
}

Td3Prior::Losses Td3Prior::Update(const PolicyBuffer& buffer, int steps,
                                  int batch_size) {
  Losses losses;
  if (steps <= 0) return losses;
  if (buffer.size() < static_cast<std::size_t>(batch_size)) {
    throw Error(ErrorCode::kInvalidArgument,
                "Td3Prior::Update: buffer smaller than batch");
  }
  const int od = obs_dim_;
  const int ad = action_dim_;
  std::uniform_int_distribution<std::size_t> pick(0, buffer.size() - 1);
  std::normal_distribution<double> noise(0.0, config_.target_noise);

  Batch obs(batch_size, od), next_obs(batch_size, od);
  Batch actions(batch_size, ad);
  Vector rewards(batch_size);
  Batch critic_in(batch_size, od + ad), next_in(batch_size, od + ad);
  Mlp::Tape tape1, tape2, actor_tape, q_tape;
  Vector grad;

  for (int step = 0; step < steps; ++step) {
    ++total_steps_;
    for (int b = 0; b < batch_size; ++b) {
      const Experience& e = buffer[pick(rng_)];
      for (int d = 0; d < od; ++d) {
        obs(b, d) = e.obs[d];
        next_obs(b, d) = e.next_obs[d];
      }
      for (int d = 0; d < ad; ++d) actions(b, d) = e.action[d];
      rewards[b] = e.reward;
    }

    // clipped double-Q target with target policy smoothing
    Batch next_actions = ActorForward(actor_target_, next_obs, nullptr);
    for (Eigen::Index b = 0; b < next_actions.rows(); ++b) {
      for (int d = 0; d < ad; ++d) {
        const double eps = std::clamp(noise(rng_), -config_.target_noise_clip,
                                      config_.target_noise_clip);
        next_actions(b, d) =
            std::clamp(next_actions(b, d) + eps, -bound_, bound_);
      }
    }
    next_in << next_obs, next_actions;
    critic_in << obs, actions;
    const Batch q1_next = critic1_target_.Forward(next_in);
    const Batch q2_next = critic2_target_.Forward(next_in);
    Vector target(batch_size);
    for (int b = 0; b < batch_size; ++b) {
      target[b] = rewards[b] + config_.gamma * std::min(q1_next(b, 0),
                                                        q2_next(b, 0));
    }

    double critic_loss = 0.0;
    auto critic_step = [&](Mlp& critic, Adam& opt, Mlp::Tape& tape) {
      const Batch q = critic.Forward(critic_in, &tape);
      Batch upstream(batch_size, 1);
      for (int b = 0; b < batch_size; ++b) {
        const double diff = q(b, 0) - target[b];
        critic_loss += diff * diff / batch_size;
        upstream(b, 0) = 2.0 * diff / batch_size;
      }
      grad.setZero(0);
      critic.Backward(tape, upstream, &grad);
      opt.Step(critic.parameters(), Span(grad));
    };
    critic_step(critic1_, critic1_opt_, tape1);
    critic_step(critic2_, critic2_opt_, tape2);
    CheckFinite(critic_loss, "Td3Prior::Update critic");
    losses.critic = critic_loss;

    if (total_steps_ % static_cast<std::uint64_t>(config_.policy_delay) != 0) {
      continue;
    }
    // actor: maximize Q1(s, pi(s))
    const Batch z = actor_.Forward(obs, &actor_tape);
    const Batch pi = bound_ * z.array().tanh();
    Batch q_in(batch_size, od + ad);
    q_in << obs, pi;
    const Batch q = critic1_.Forward(q_in, &q_tape);
    losses.actor = -q.mean();
    CheckFinite(losses.actor, "Td3Prior::Update actor");
    const Batch dq = Batch::Constant(batch_size, 1, -1.0 / batch_size);
    Vector critic_grad;
    Batch input_grad;
    critic1_.Backward(q_tape, dq, &critic_grad, &input_grad);
    Batch dz(batch_size, ad);
    for (int b = 0; b < batch_size; ++b) {
      for (int d = 0; d < ad; ++d) {
        const double t = std::tanh(z(b, d));
        dz(b, d) = input_grad(b, od + d) * bound_ * (1.0 - t * t);
      }
    }
    grad.setZero(0);
    actor_.Backward(actor_tape, dz, &grad);
    actor_opt_.Step(actor_.parameters(), Span(grad));

    actor_target_.SoftUpdateFrom(actor_, config_.tau);
    critic1_target_.SoftUpdateFrom(critic1_, config_.tau);
    critic2_target_.SoftUpdateFrom(critic2_, config_.tau);
  }
  return losses;
}

nlohmann::json Td3Prior::ToJson() const {
  return {{"format", "aop-td3-prior"},
          {"version", 1},
          {"actor", actor_.ToJson()},
          {"critic1", critic1_.ToJson()},
          {"critic2", critic2_.ToJson()}};
}

}  // namespace aop
