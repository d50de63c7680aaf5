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

#ifndef AOP_PLANNER_H_
#define AOP_PLANNER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aop/rng.h"
#include "aop/trajectory.h"
#include "aop/value_ensemble.h"
#include "aop/world.h"

namespace aop {

struct PlannerConfig {
  double lambda = 0.01;      // MPPI temperature
  double noise_std = 0.1;    // per action dimension, per timestep
  int pop_size = 40;
  int max_iters = 8;
  double delta_thres_first = 0.01;
  double delta_thres_later = 0.05;
  // probability of planning on after the improvement drops below threshold
  double eps_plan = 0.2;
  // population member 0 is the unperturbed base sequence
  bool keep_elite = true;
  // warm-start from the previous plan; when false and a prior exists the
  // prior rollout is always the base (policy-only control)
  bool reuse_plan = true;
  // threads for population rollouts; results do not depend on this
  int workers = 1;

  void Validate() const;
};

struct HorizonConfig {
  int h_full = 80;
  int h_min = 1;
  double sigma_thres = 8.0;
  double eps_thres = 25.0;

  void Validate() const;
};

// Deterministic action source used as the planner's prior.
class PolicyPrior {
 public:
  virtual ~PolicyPrior() = default;
  virtual ActionVec Act(std::span<const double> obs) const = 0;
};

// Noise-free H-step rollout of `prior` through the model.
Trajectory PriorRollout(const PolicyPrior& prior, const World& world,
                        const StateVec& start, int horizon);

// Sets traj.return_estimate to sum_{k<H} gamma^k r_k + gamma^H V(s_H), with
// V the ensemble aggregate (0 without an ensemble), over the first
// `horizon` steps.
void ScoreTrajectory(Trajectory& traj, const World& world,
                     const ValueEnsemble* ensemble, double gamma, int horizon);
// Batched version of ScoreTrajectory over a population.
void ScorePopulation(std::span<Trajectory> population, const World& world,
                     const ValueEnsemble* ensemble, double gamma, int horizon);

// w_i proportional to exp(J_i / lambda), computed with the max shifted out.
std::vector<double> SoftmaxWeights(std::span<const double> returns,
                                   double lambda);

// Identifies the noise streams of one planning iteration.
struct NoiseKey {
  std::uint64_t seed = 0;
  std::int64_t timestep = 0;
  int iteration = 0;

  CounterRng MemberStream(int member) const {
    return CounterRng({seed, static_cast<std::uint64_t>(timestep),
                       static_cast<std::uint64_t>(iteration),
                       static_cast<std::uint64_t>(member)});
  }
  CounterRng TerminationStream() const {
    return CounterRng({seed, static_cast<std::uint64_t>(timestep),
                       static_cast<std::uint64_t>(iteration),
                       0x7465726d696e61ULL});
  }
};

struct MppiResult {
  Trajectory next;                     // scored over `horizon`
  std::vector<Trajectory> population;  // scored over `horizon`
  std::vector<double> weights;
};

// One MPPI iteration around the first `horizon` actions of `base`.
MppiResult MppiUpdate(const Trajectory& base, const World& world,
                      const ValueEnsemble* ensemble, const PlannerConfig& cfg,
                      double gamma, int horizon, const NoiseKey& key);

// Selects H_t: the full horizon when sigma >= sigma_thres, otherwise the
// largest H in [h_min, h_full] with eps(H) > eps_thres (h_min if none).
// `bellman_errors` is indexed by H and must cover 0..h_full.
int SelectHorizon(double sigma, std::span<const double> bellman_errors,
                  const HorizonConfig& hcfg);

struct Improvement {
  double delta = 0.0;
  // |R(prev)| was below 1e-8 and the denominator was floored
  bool guarded = false;
};

// (R(next) - R(prev)) / |R(prev)| using return_estimate as R.
Improvement ComputeImprovement(double prev_return, double next_return);
Improvement ComputeImprovement(const Trajectory& prev, const Trajectory& next);

double TerminationThreshold(int iter_index, const PlannerConfig& cfg);
// iter_index counts from 1.
bool ShouldTerminate(double delta, int iter_index, const PlannerConfig& cfg,
                     CounterRng& rng);

enum class PlanSource { kNone, kPrior, kShifted };
const char* PlanSourceName(PlanSource source);

struct PlanRecord {
  std::int64_t timestep = 0;
  int horizon = 0;  // H_t
  int iterations = 0;
  std::int64_t rolled_timesteps = 0;
  double sigma = 0.0;
  // Bellman error at H = h_min of the plan entering optimization
  double bellman_error = 0.0;
  std::vector<double> deltas;
  PlanSource source = PlanSource::kNone;
  double plan_return = 0.0;
};

struct PlanResult {
  ActionVec action{};
  PlanRecord record;
  // final full-length plan (re-rolled, scored over h_full)
  Trajectory plan;
  // every population rollout of every iteration, in order
  std::vector<Trajectory> population;
};

// The per-timestep AOP planning loop. Keeps the previous plan between calls
// and shifts it forward one step at the start of each call.
class Planner {
 public:
  Planner(PlannerConfig cfg, HorizonConfig hcfg, double gamma,
          std::uint64_t seed);

  PlanResult Plan(const StateVec& state, std::int64_t timestep,
                  const World& world, const PolicyPrior* prior,
                  const ValueEnsemble* ensemble, bool keep_population = false);

  const PlannerConfig& config() const { return cfg_; }
  const HorizonConfig& horizon_config() const { return hcfg_; }
  double gamma() const { return gamma_; }
  const std::optional<Trajectory>& previous_plan() const { return previous_; }

 private:
  PlannerConfig cfg_;
  HorizonConfig hcfg_;
  double gamma_;
  std::uint64_t seed_;
  std::optional<Trajectory> previous_;
};

}  // namespace aop

#endif  // AOP_PLANNER_H_
