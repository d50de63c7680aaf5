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

#include "aop/planner.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "aop/errors.h"

namespace aop {

void PlannerConfig::Validate() const {
  if (!(lambda > 0.0) || noise_std < 0.0 || pop_size <= 0 || max_iters <= 0 ||
      workers <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "PlannerConfig: lambda, pop_size, max_iters and workers must "
                "be positive and noise_std non-negative");
  }
  if (eps_plan < 0.0 || eps_plan > 1.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "PlannerConfig: eps_plan must lie in [0, 1]");
  }
}

void HorizonConfig::Validate() const {
  if (h_min < 1 || h_min > h_full) {
    throw Error(ErrorCode::kInvalidArgument,
                "HorizonConfig: need 1 <= h_min <= h_full");
  }
  if (sigma_thres < 0.0 || eps_thres < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "HorizonConfig: thresholds must be non-negative");
  }
}

Trajectory PriorRollout(const PolicyPrior& prior, const World& world,
                        const StateVec& start, int horizon) {
  Trajectory traj;
  traj.states.reserve(static_cast<std::size_t>(horizon) + 1);
  traj.actions.reserve(horizon);
  traj.rewards.reserve(horizon);
  traj.states.push_back(start);
  std::array<double, kMaxObservationDim> obs{};
  const std::span<double> obs_view(obs.data(), world.observation_dim());
  for (int k = 0; k < horizon; ++k) {
    world.Observe(traj.states.back(), obs_view);
    const ActionVec a = prior.Act(obs_view);
    const Transition tr = world.Step(traj.states.back(), a);
    traj.actions.push_back(a);
    traj.states.push_back(tr.next);
    traj.rewards.push_back(tr.reward);
    traj.contacts += tr.contact ? 1 : 0;
  }
  return traj;
}

void ScorePopulation(std::span<Trajectory> population, const World& world,
                     const ValueEnsemble* ensemble, double gamma, int horizon) {
  const double discount_h = std::pow(gamma, horizon);
  std::vector<double> terminal(population.size(), 0.0);
  if (ensemble != nullptr) {
    std::vector<StateVec> ends;
    ends.reserve(population.size());
    for (const Trajectory& t : population) ends.push_back(t.states[horizon]);
    const Eigen::MatrixXd values =
        ensemble->MemberValues(ObservationBatch(world, ends));
    std::vector<double> row(values.cols());
    for (std::size_t i = 0; i < population.size(); ++i) {
      for (Eigen::Index m = 0; m < values.cols(); ++m) row[m] = values(i, m);
      terminal[i] = LogSumExpAggregate(row, ensemble->config().kappa);
    }
  }
  for (std::size_t i = 0; i < population.size(); ++i) {
    Trajectory& t = population[i];
    if (t.horizon() < horizon) {
      throw Error(ErrorCode::kOutOfRange,
                  "ScoreTrajectory: trajectory shorter than horizon");
    }
    t.terminal_value = terminal[i];
    t.return_estimate =
        DiscountedReturn(std::span(t.rewards.data(), horizon), gamma) +
        discount_h * terminal[i];
  }
}

void ScoreTrajectory(Trajectory& traj, const World& world,
                     const ValueEnsemble* ensemble, double gamma, int horizon) {
  ScorePopulation(std::span(&traj, 1), world, ensemble, gamma, horizon);
}

std::vector<double> SoftmaxWeights(std::span<const double> returns,
                                   double lambda) {
  const double best = *std::max_element(returns.begin(), returns.end());
  std::vector<double> w(returns.size());
  double total = 0.0;
  for (std::size_t i = 0; i < returns.size(); ++i) {
    w[i] = std::exp((returns[i] - best) / lambda);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

MppiResult MppiUpdate(const Trajectory& base, const World& world,
                      const ValueEnsemble* ensemble, const PlannerConfig& cfg,
                      double gamma, int horizon, const NoiseKey& key) {
  if (horizon < 0 || base.horizon() < horizon) {
    throw Error(ErrorCode::kOutOfRange,
                "MppiUpdate: base trajectory shorter than horizon");
  }
  const int adim = world.action_dim();
  const double bound = world.action_bound();
  const StateVec& start = base.states.front();
  MppiResult result;
  result.population.resize(cfg.pop_size);

  auto make_member = [&](int i) {
    std::vector<ActionVec> actions(base.actions.begin(),
                                   base.actions.begin() + horizon);
    if (!(cfg.keep_elite && i == 0)) {
      CounterRng rng = key.MemberStream(i);
      std::normal_distribution<double> noise(0.0, cfg.noise_std);
      for (ActionVec& a : actions) {
        for (int d = 0; d < adim; ++d) {
          a[d] = std::clamp(a[d] + noise(rng), -bound, bound);
        }
      }
    }
    result.population[i] = ModelRollout(world, start, actions);
  };

  const int workers = std::min(cfg.workers, cfg.pop_size);
  if (workers <= 1) {
    for (int i = 0; i < cfg.pop_size; ++i) make_member(i);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < cfg.pop_size; i += workers) make_member(i);
      });
    }
  }

  ScorePopulation(result.population, world, ensemble, gamma, horizon);
  std::vector<double> returns;
  returns.reserve(cfg.pop_size);
  for (const Trajectory& t : result.population) {
    returns.push_back(t.return_estimate);
  }
  result.weights = SoftmaxWeights(returns, cfg.lambda);

  std::vector<ActionVec> mean_actions(horizon, ActionVec{});
  for (int h = 0; h < horizon; ++h) {
    for (int d = 0; d < adim; ++d) {
      double acc = 0.0;
      for (int i = 0; i < cfg.pop_size; ++i) {
        acc += result.weights[i] * result.population[i].actions[h][d];
      }
      mean_actions[h][d] = acc;
    }
  }
  result.next = ModelRollout(world, start, mean_actions);
  ScoreTrajectory(result.next, world, ensemble, gamma, horizon);
  return result;
}

int SelectHorizon(double sigma, std::span<const double> bellman_errors,
                  const HorizonConfig& hcfg) {
  if (static_cast<int>(bellman_errors.size()) < hcfg.h_full + 1) {
    ThrowDimensionMismatch("SelectHorizon bellman_errors", hcfg.h_full + 1,
                           static_cast<long>(bellman_errors.size()));
  }
  if (sigma >= hcfg.sigma_thres) return hcfg.h_full;
  for (int h = hcfg.h_full; h >= hcfg.h_min; --h) {
    if (bellman_errors[h] > hcfg.eps_thres) return h;
  }
  return hcfg.h_min;
}

Improvement ComputeImprovement(double prev_return, double next_return) {
  constexpr double kFloor = 1e-8;
  Improvement imp;
  double denom = std::abs(prev_return);
  if (denom < kFloor) {
    denom = kFloor;
    imp.guarded = true;
  }
  imp.delta = (next_return - prev_return) / denom;
  return imp;
}

Improvement ComputeImprovement(const Trajectory& prev, const Trajectory& next) {
  return ComputeImprovement(prev.return_estimate, next.return_estimate);
}

double TerminationThreshold(int iter_index, const PlannerConfig& cfg) {
  return iter_index == 1 ? cfg.delta_thres_first : cfg.delta_thres_later;
}

bool ShouldTerminate(double delta, int iter_index, const PlannerConfig& cfg,
                     CounterRng& rng) {
  if (iter_index < 1) {
    throw Error(ErrorCode::kOutOfRange, "ShouldTerminate: iter_index >= 1");
  }
  if (!(delta < TerminationThreshold(iter_index, cfg))) return false;
  return rng.Uniform() < 1.0 - cfg.eps_plan;
}

const char* PlanSourceName(PlanSource source) {
  switch (source) {
    case PlanSource::kPrior:
      return "prior";
    case PlanSource::kShifted:
      return "shifted";
    case PlanSource::kNone:
      break;
  }
  return "none";
}

Planner::Planner(PlannerConfig cfg, HorizonConfig hcfg, double gamma,
                 std::uint64_t seed)
    : cfg_(cfg), hcfg_(hcfg), gamma_(gamma), seed_(seed) {
  cfg_.Validate();
  hcfg_.Validate();
  if (gamma_ < 0.0 || gamma_ >= 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "Planner: gamma must be in [0, 1)");
  }
}

PlanResult Planner::Plan(const StateVec& state, std::int64_t timestep,
                         const World& world, const PolicyPrior* prior,
                         const ValueEnsemble* ensemble, bool keep_population) {
  const int h_full = hcfg_.h_full;
  PlanResult out;
  PlanRecord& rec = out.record;
  rec.timestep = timestep;

  // Previous plan advanced one step, re-rolled through the current model so
  // no reward from an earlier world survives.
  std::vector<ActionVec> shifted_actions(h_full, ActionVec{});
  if (previous_) {
    const int keep = std::min(previous_->horizon() - 1, h_full);
    std::copy(previous_->actions.begin() + 1,
              previous_->actions.begin() + 1 + keep, shifted_actions.begin());
  }
  Trajectory plan = ModelRollout(world, state, shifted_actions);
  ScoreTrajectory(plan, world, ensemble, gamma_, h_full);
  rec.source = PlanSource::kShifted;
  if (prior != nullptr) {
    Trajectory from_prior = PriorRollout(*prior, world, state, h_full);
    ScoreTrajectory(from_prior, world, ensemble, gamma_, h_full);
    // ties stay with the shifted plan
    if (!cfg_.reuse_plan ||
        from_prior.return_estimate > plan.return_estimate) {
      plan = std::move(from_prior);
      rec.source = PlanSource::kPrior;
    }
  }

  std::vector<double> errors(static_cast<std::size_t>(h_full) + 1, 0.0);
  if (ensemble != nullptr) {
    std::array<double, kMaxObservationDim> obs{};
    const std::span<double> obs_view(obs.data(), world.observation_dim());
    world.Observe(state, obs_view);
    rec.sigma = ensemble->EnsembleStd(obs_view);
    errors = ensemble->BellmanErrors(world, plan, h_full);
  }
  rec.bellman_error = errors[hcfg_.h_min];
  const int horizon = SelectHorizon(rec.sigma, errors, hcfg_);
  rec.horizon = horizon;

  Trajectory current;
  current.states.assign(plan.states.begin(), plan.states.begin() + horizon + 1);
  current.actions.assign(plan.actions.begin(), plan.actions.begin() + horizon);
  current.rewards.assign(plan.rewards.begin(), plan.rewards.begin() + horizon);
  ScoreTrajectory(current, world, ensemble, gamma_, horizon);

  for (int k = 1; k <= cfg_.max_iters; ++k) {
    const NoiseKey key{seed_, timestep, k};
    MppiResult step =
        MppiUpdate(current, world, ensemble, cfg_, gamma_, horizon, key);
    rec.iterations = k;
    rec.rolled_timesteps += static_cast<std::int64_t>(cfg_.pop_size) * horizon;
    const Improvement imp = ComputeImprovement(current, step.next);
    rec.deltas.push_back(imp.delta);
    current = std::move(step.next);
    if (keep_population) {
      std::move(step.population.begin(), step.population.end(),
                std::back_inserter(out.population));
    }
    CounterRng term = key.TerminationStream();
    if (ShouldTerminate(imp.delta, k, cfg_, term)) break;
  }

  std::vector<ActionVec> final_actions = current.actions;
  final_actions.insert(final_actions.end(), plan.actions.begin() + horizon,
                       plan.actions.end());
  out.plan = ModelRollout(world, state, final_actions);
  ScoreTrajectory(out.plan, world, ensemble, gamma_, h_full);
  rec.plan_return = out.plan.return_estimate;
  out.action = out.plan.actions.front();
  previous_ = out.plan;
  return out;
}

}  // namespace aop
