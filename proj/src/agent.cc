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

#include "aop/agent.h"

#include <algorithm>
#include <numeric>

#include "aop/errors.h"
#include "aop/rng.h"

namespace aop {

namespace {

constexpr struct {
  AgentMode mode;
  const char* name;
} kModeNames[] = {
    {AgentMode::kAopTd3, "AOP-TD3"}, {AgentMode::kAopBc, "AOP-BC"},
    {AgentMode::kPolo, "POLO"},      {AgentMode::kMpc8, "MPC-8"},
    {AgentMode::kMpc3, "MPC-3"},     {AgentMode::kTd3Only, "TD3"},
};

}  // namespace

const char* AgentModeName(AgentMode mode) {
  for (const auto& m : kModeNames) {
    if (m.mode == mode) return m.name;
  }
  return "unknown";
}

std::optional<AgentMode> ParseAgentMode(const std::string& name) {
  for (const auto& m : kModeNames) {
    if (name == m.name) return m.mode;
  }
  if (name == "TD3-only") return AgentMode::kTd3Only;
  return std::nullopt;
}

AgentConfig AgentConfig::ForMode(AgentMode mode) {
  AgentConfig cfg;
  cfg.mode = mode;
  auto fixed_compute = [&cfg](int iterations) {
    // sigma_thres = 0 pins H_t to H_full; eps_plan = 1 never stops early
    cfg.horizon.sigma_thres = 0.0;
    cfg.planner.eps_plan = 1.0;
    cfg.planner.max_iters = iterations;
  };
  switch (mode) {
    case AgentMode::kAopTd3:
    case AgentMode::kAopBc:
      break;
    case AgentMode::kPolo:
      fixed_compute(3);
      break;
    case AgentMode::kMpc8:
      fixed_compute(8);
      break;
    case AgentMode::kMpc3:
      fixed_compute(3);
      break;
    case AgentMode::kTd3Only:
      fixed_compute(1);
      cfg.horizon.h_full = 256;
      cfg.planner.pop_size = 1;
      cfg.planner.noise_std = 0.2;
      cfg.planner.keep_elite = false;
      cfg.planner.reuse_plan = false;
      break;
  }
  cfg.td3.gamma = cfg.gamma;
  cfg.ensemble.gamma = cfg.gamma;
  return cfg;
}

bool AgentConfig::uses_ensemble() const {
  return mode == AgentMode::kAopTd3 || mode == AgentMode::kAopBc ||
         mode == AgentMode::kPolo;
}

void AgentConfig::Validate() const {
  planner.Validate();
  horizon.Validate();
  if (gamma < 0.0 || gamma >= 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "AgentConfig: gamma in [0, 1)");
  }
  if (update_every <= 0 || value_steps < 0 || value_batch <= 0 ||
      bc_steps < 0 || bc_batch <= 0 || td3_steps < 0 || td3_batch <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "AgentConfig: update cadence and batch sizes must be positive");
  }
}

nlohmann::json StepLog::ToJson() const {
  const int adim = kMaxActionDim;
  return {
      {"t", t},
      {"reward", reward},
      {"rolled_timesteps", rolled_timesteps},
      {"horizon", horizon},
      {"iterations", iterations},
      {"sigma", sigma},
      {"bellman_error", bellman_error},
      {"world", world_index},
      {"contact", contact},
      {"clamped", clamped},
      {"source", PlanSourceName(source)},
      {"plan_return", plan_return},
      {"deltas", deltas},
      {"action", std::vector<double>(action.begin(), action.begin() + adim)},
      {"state", std::vector<double>(state.begin(), state.end())},
      {"next_state", std::vector<double>(next_state.begin(), next_state.end())},
  };
}

StepLog StepLog::FromJson(const nlohmann::json& j) {
  StepLog s;
  try {
    s.t = j.at("t").get<std::int64_t>();
    s.reward = j.at("reward").get<double>();
    s.rolled_timesteps = j.at("rolled_timesteps").get<std::int64_t>();
    s.horizon = j.at("horizon").get<int>();
    s.iterations = j.at("iterations").get<int>();
    s.sigma = j.at("sigma").get<double>();
    s.bellman_error = j.at("bellman_error").get<double>();
    s.world_index = j.at("world").get<int>();
    s.contact = j.at("contact").get<bool>();
    s.clamped = j.at("clamped").get<bool>();
    const std::string src = j.at("source").get<std::string>();
    s.source = src == "prior"     ? PlanSource::kPrior
               : src == "shifted" ? PlanSource::kShifted
                                  : PlanSource::kNone;
    s.plan_return = j.at("plan_return").get<double>();
    s.deltas = j.at("deltas").get<std::vector<double>>();
    const auto a = j.at("action").get<std::vector<double>>();
    std::copy_n(a.begin(), std::min<std::size_t>(a.size(), kMaxActionDim),
                s.action.begin());
    const auto st = j.at("state").get<std::vector<double>>();
    std::copy_n(st.begin(), std::min<std::size_t>(st.size(), kMaxStateDim),
                s.state.begin());
    const auto ns = j.at("next_state").get<std::vector<double>>();
    std::copy_n(ns.begin(), std::min<std::size_t>(ns.size(), kMaxStateDim),
                s.next_state.begin());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("StepLog: ") + e.what());
  }
  return s;
}

Agent::Agent(AgentConfig cfg, int observation_dim, int action_dim,
             double action_bound)
    : cfg_(std::move(cfg)),
      obs_dim_(observation_dim),
      action_dim_(action_dim),
      planner_(cfg_.planner, cfg_.horizon, cfg_.gamma,
               DeriveKey({cfg_.seed, 1})),
      value_buffer_(cfg_.value_capacity),
      policy_buffer_(cfg_.policy_capacity) {
  cfg_.Validate();
  if (observation_dim > kMaxObservationDim || action_dim > kMaxActionDim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "Agent: observation or action dimension too large");
  }
  cfg_.ensemble.gamma = cfg_.gamma;
  cfg_.td3.gamma = cfg_.gamma;
  if (cfg_.uses_ensemble()) {
    ensemble_ = std::make_unique<ValueEnsemble>(obs_dim_, cfg_.ensemble,
                                                DeriveKey({cfg_.seed, 2}));
  }
  if (cfg_.uses_bc()) {
    bc_ = std::make_unique<BcPrior>(obs_dim_, action_dim_, action_bound,
                                    cfg_.bc, DeriveKey({cfg_.seed, 3}));
  }
  if (cfg_.uses_td3()) {
    td3_ = std::make_unique<Td3Prior>(obs_dim_, action_dim_, action_bound,
                                      cfg_.td3, DeriveKey({cfg_.seed, 3}));
  }
}

const PolicyPrior* Agent::prior() const {
  if (bc_) return bc_.get();
  if (td3_) return td3_.get();
  return nullptr;
}

void Agent::StoreTransitions(const World& world, const Trajectory& traj,
                             int steps) {
  Experience e;
  world.Observe(traj.states[0], std::span(e.obs.data(), obs_dim_));
  for (int k = 0; k < steps; ++k) {
    e.action = traj.actions[k];
    ClampAction(e.action, action_dim_, world.action_bound());
    e.reward = traj.rewards[k];
    world.Observe(traj.states[k + 1], std::span(e.next_obs.data(), obs_dim_));
    policy_buffer_.Push(e);
    e.obs = e.next_obs;
  }
}

void Agent::Learn() {
  if (ensemble_ && !value_buffer_.empty()) {
    ensemble_->Train(value_buffer_, cfg_.value_steps, cfg_.value_batch);
  }
  if (bc_ && !policy_buffer_.empty()) {
    bc_->Update(policy_buffer_, cfg_.bc_steps, cfg_.bc_batch);
  }
  if (td3_ && policy_buffer_.size() >= static_cast<std::size_t>(cfg_.td3_batch)) {
    td3_->Update(policy_buffer_, cfg_.td3_steps, cfg_.td3_batch);
  }
}

StepLog Agent::Step(LifelongEnv& env) {
  const EnvModel model = env.model();
  const World& world = *model;
  StepLog log;
  log.t = env.clock();
  log.state = env.state();

  PlanResult plan = planner_.Plan(env.state(), env.clock(), world, prior(),
                                  ensemble_.get(), td3_ != nullptr);
  if (td3_) {
    for (const Trajectory& traj : plan.population) {
      StoreTransitions(world, traj, traj.horizon());
    }
  } else if (bc_) {
    StoreTransitions(world, plan.plan, plan.record.horizon);
  }

  if (env.clock() % cfg_.update_every == 0) Learn();

  Experience e;
  env.Observe(std::span(e.obs.data(), obs_dim_));
  e.action = plan.action;
  log.next_state = world.Step(env.state(), plan.action).next;
  const StepRecord step = env.Step(plan.action);
  env.Observe(std::span(e.next_obs.data(), obs_dim_));
  ClampAction(e.action, action_dim_, world.action_bound());
  e.reward = step.reward;
  value_buffer_.Push(e);

  log.reward = step.reward;
  log.contact = step.contact;
  log.clamped = step.clamped;
  log.world_index = step.world_index;
  log.action = plan.action;
  log.rolled_timesteps = plan.record.rolled_timesteps;
  log.horizon = plan.record.horizon;
  log.iterations = plan.record.iterations;
  log.sigma = plan.record.sigma;
  log.bellman_error = plan.record.bellman_error;
  log.source = plan.record.source;
  log.plan_return = plan.record.plan_return;
  log.deltas = std::move(plan.record.deltas);
  return log;
}

LifetimeLog RunLifetime(LifelongEnv& env, const AgentConfig& cfg,
                        std::int64_t total_steps, const StepObserver& observer) {
  if (total_steps <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "RunLifetime: T_total must be > 0");
  }
  Agent agent(cfg, env.observation_dim(), env.action_dim(),
              env.model()->action_bound());
  LifetimeLog log;
  log.steps.reserve(static_cast<std::size_t>(total_steps));
  try {
    for (std::int64_t t = 0; t < total_steps; ++t) {
      log.steps.push_back(agent.Step(env));
      if (observer) observer(agent, env, log.steps.back());
    }
  } catch (const Error& e) {
    log.error = e.what();
  }
  return log;
}

double PlanningFraction(const LifetimeLog& log) {
  if (log.steps.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "PlanningFraction: empty log");
  }
  double rolled = 0.0;
  for (const StepLog& s : log.steps) rolled += static_cast<double>(s.rolled_timesteps);
  return rolled / (static_cast<double>(log.steps.size()) * kMpc8TimestepsPerStep);
}

double AverageLifetimeReward(const LifetimeLog& log) {
  if (log.steps.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "AverageLifetimeReward: empty log");
  }
  double total = 0.0;
  for (const StepLog& s : log.steps) total += s.reward;
  return total / static_cast<double>(log.steps.size());
}

}  // namespace aop
