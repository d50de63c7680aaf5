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

#ifndef AOP_REGRET_H_
#define AOP_REGRET_H_

#include <cstdint>
#include <vector>

namespace aop {

// Deterministic tabular MDP: s' = next[s * A + a], r = reward[s * A + a].
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  double gamma = 0.9;
  double r_max = 1.0;
  std::vector<int> next;
  std::vector<double> reward;

  int Next(int s, int a) const { return next[s * num_actions + a]; }
  double Reward(int s, int a) const { return reward[s * num_actions + a]; }

  // Throws kInvalidArgument on bad sizes, targets, |r| > r_max or gamma.
  void Validate() const;

  static constexpr int kMaxStates = 200;
  static constexpr int kMaxActions = 8;
};

// Uniform successors, rewards uniform in [-r_max, r_max].
TabularMdp RandomMdp(int num_states, int num_actions, double gamma,
                     std::uint64_t seed, double r_max = 1.0);

struct ValueIterationResult {
  std::vector<double> values;
  std::vector<int> policy;  // greedy, lowest action index on ties
  int iterations = 0;
  double residual = 0.0;    // sup-norm Bellman residual at exit
};

ValueIterationResult ValueIteration(const TabularMdp& mdp,
                                    double tolerance = 1e-12);

// Exact value of a deterministic stationary policy (LU solve).
std::vector<double> PolicyValue(const TabularMdp& mdp,
                                const std::vector<int>& policy);

std::vector<int> GreedyPolicy(const TabularMdp& mdp,
                              const std::vector<double>& values);

struct PathRollout {
  std::vector<int> states;  // H + 1
  std::vector<double> rewards;
  double discounted_return = 0.0;
};

PathRollout RollActions(const TabularMdp& mdp, int start,
                        const std::vector<int>& actions);
PathRollout RollPolicy(const TabularMdp& mdp, int start,
                       const std::vector<int>& policy, int steps);

struct HorizonPlanResult {
  std::vector<int> actions;
  PathRollout path;
  double objective = 0.0;  // H-step return + gamma^H * value(s_H)
};

inline constexpr double kMaxPlanSequences = 1e7;

// Exhaustive search over all A^H action sequences; the lexicographically
// first maximizer wins ties.  Throws kTooLarge beyond kMaxPlanSequences.
HorizonPlanResult HorizonPlan(const TabularMdp& mdp, int start, int horizon,
                              const std::vector<double>& value_estimate);

struct RegretReport {
  double regret = 0.0;      // R
  double long_term = 0.0;   // LR
  double short_term = 0.0;  // SR
  double eps_v = 0.0;
  double eps_p = 0.0;
  double bound = 0.0;
  int horizon = 0;
  double gamma = 0.0;

  bool Holds(double slack = 1e-9) const { return long_term <= bound + slack; }
  // |R - (gamma^H LR + SR)|
  double DecompositionGap() const;
};

// Continuation policy is greedy on `value_estimate`.
RegretReport ComputeRegret(const TabularMdp& mdp, int start, int horizon,
                           const std::vector<double>& value_estimate);

// 2 R_max (1 - gamma^H) / (gamma^H (1 - gamma)) + 2 eps_v + eps_p
double RegretBound(double r_max, double gamma, int horizon, double eps_v,
                   double eps_p);

// Start state 0 branches on the first action; branch b pays
// `immediate[b]` at once, then walks a zero-reward corridor and pays
// `delayed[b]` on its last step, `depth` steps after the start; all
// branches then sit in a zero-reward absorbing state.
TabularMdp DelayedRewardMdp(const std::vector<double>& immediate,
                            const std::vector<double>& delayed, int depth,
                            double gamma);

// Default instance: myopic branches pay more now and less later.
TabularMdp DelayedRewardMdp(int branches, int depth, double gamma);

struct RankedTrajectory {
  std::vector<double> rewards;           // length H_max
  std::vector<double> terminal_values;   // value estimate at s_h, h = 0..H_max
  double oracle = 0.0;                   // ground-truth long-horizon score
};

// ranks[h - 1][i]: rank of trajectory i scored at horizon h (1 = best,
// ties share their mean rank), h = 1..h_max.
std::vector<std::vector<double>> RankingMatrix(
    const std::vector<RankedTrajectory>& population, int h_max, double gamma);

std::vector<double> OracleRanks(const std::vector<RankedTrajectory>& population);

// Mean ranks of `scores` (descending, 1 = best).
std::vector<double> RankDescending(const std::vector<double>& scores);

// Kendall tau-b; 0 when either side is entirely tied.
double KendallTau(const std::vector<double>& a, const std::vector<double>& b);

// One trajectory per branch of the delayed-reward instance, horizon = depth.
// With exact_values the terminal value at s_h is the true remaining return
// of that trajectory; otherwise zero.
std::vector<RankedTrajectory> DelayedRewardPopulation(const TabularMdp& mdp,
                                                      int depth,
                                                      bool exact_values);

struct RegretSweepConfig {
  int instances = 100;
  int max_states = 20;
  int max_actions = 3;
  int max_horizon = 5;
  std::vector<double> gammas{0.5, 0.9, 0.99};
  // value estimate = V* + uniform noise of amplitude up to this fraction of
  // R_max / (1 - gamma)
  double max_noise = 0.5;
  std::uint64_t seed = 0;
};

struct RegretSweepRow {
  std::uint64_t seed = 0;
  int num_states = 0;
  int num_actions = 0;
  RegretReport report;
};

std::vector<RegretSweepRow> RegretSweep(const RegretSweepConfig& cfg);

}  // namespace aop

#endif  // AOP_REGRET_H_
