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

#include "aop/regret.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "aop/errors.h"
#include "aop/rng.h"

namespace aop {

void TabularMdp::Validate() const {
  if (num_states < 1 || num_states > kMaxStates || num_actions < 1 ||
      num_actions > kMaxActions) {
    throw Error(ErrorCode::kInvalidArgument,
                "TabularMdp: need 1 <= S <= 200 and 1 <= A <= 8");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "TabularMdp: gamma in [0, 1)");
  }
  const std::size_t n = static_cast<std::size_t>(num_states) * num_actions;
  if (next.size() != n || reward.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "TabularMdp: tables must have S * A entries");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (next[i] < 0 || next[i] >= num_states) {
      throw Error(ErrorCode::kOutOfRange,
                  "TabularMdp: successor out of range at " + std::to_string(i));
    }
    if (!std::isfinite(reward[i]) || std::abs(reward[i]) > r_max) {
      throw Error(ErrorCode::kOutOfRange,
                  "TabularMdp: |reward| exceeds r_max at " + std::to_string(i));
    }
  }
}

TabularMdp RandomMdp(int num_states, int num_actions, double gamma,
                     std::uint64_t seed, double r_max) {
  TabularMdp mdp;
  mdp.num_states = num_states;
  mdp.num_actions = num_actions;
  mdp.gamma = gamma;
  mdp.r_max = r_max;
  CounterRng rng(seed);
  const std::size_t n = static_cast<std::size_t>(num_states) * num_actions;
  mdp.next.resize(n);
  mdp.reward.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    mdp.next[i] = static_cast<int>(rng() % static_cast<std::uint64_t>(num_states));
    mdp.reward[i] = r_max * (2.0 * rng.Uniform() - 1.0);
  }
  mdp.Validate();
  return mdp;
}

namespace {

double BestBackup(const TabularMdp& mdp, const std::vector<double>& v, int s,
                  int* best_action) {
  double best = -std::numeric_limits<double>::infinity();
  int arg = 0;
  for (int a = 0; a < mdp.num_actions; ++a) {
    const double q = mdp.Reward(s, a) + mdp.gamma * v[mdp.Next(s, a)];
    if (q > best) {
      best = q;
      arg = a;
    }
  }
  if (best_action != nullptr) *best_action = arg;
  return best;
}

}  // namespace

ValueIterationResult ValueIteration(const TabularMdp& mdp, double tolerance) {
  mdp.Validate();
  ValueIterationResult out;
  out.values.assign(mdp.num_states, 0.0);
  std::vector<double> next(mdp.num_states);
  // contraction at rate gamma; generous cap for gamma near 1
  const int max_iters = 200000;
  for (int it = 0; it < max_iters; ++it) {
    double residual = 0.0;
    for (int s = 0; s < mdp.num_states; ++s) {
      next[s] = BestBackup(mdp, out.values, s, nullptr);
      residual = std::max(residual, std::abs(next[s] - out.values[s]));
    }
    out.values.swap(next);
    out.iterations = it + 1;
    out.residual = residual;
    if (residual < tolerance) break;
  }
  // the greedy policy of a near-fixed point is optimal; its exact value
  // removes the remaining iteration error
  out.policy = GreedyPolicy(mdp, out.values);
  out.values = PolicyValue(mdp, out.policy);
  double residual = 0.0;
  for (int s = 0; s < mdp.num_states; ++s) {
    residual = std::max(
        residual, std::abs(BestBackup(mdp, out.values, s, nullptr) - out.values[s]));
  }
  out.residual = residual;
  return out;
}

std::vector<double> PolicyValue(const TabularMdp& mdp,
                                const std::vector<int>& policy) {
  if (static_cast<int>(policy.size()) != mdp.num_states) {
    ThrowDimensionMismatch("PolicyValue", mdp.num_states,
                           static_cast<long>(policy.size()));
  }
  const int n = mdp.num_states;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd r(n);
  for (int s = 0; s < n; ++s) {
    const int a = policy[s];
    if (a < 0 || a >= mdp.num_actions) {
      throw Error(ErrorCode::kOutOfRange, "PolicyValue: action out of range");
    }
    m(s, mdp.Next(s, a)) -= mdp.gamma;
    r[s] = mdp.Reward(s, a);
  }
  Eigen::VectorXd v = m.partialPivLu().solve(r);
  return std::vector<double>(v.data(), v.data() + n);
}

std::vector<int> GreedyPolicy(const TabularMdp& mdp,
                              const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != mdp.num_states) {
    ThrowDimensionMismatch("GreedyPolicy", mdp.num_states,
                           static_cast<long>(values.size()));
  }
  std::vector<int> policy(mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s) {
    BestBackup(mdp, values, s, &policy[s]);
  }
  return policy;
}

PathRollout RollActions(const TabularMdp& mdp, int start,
                        const std::vector<int>& actions) {
  PathRollout out;
  out.states.push_back(start);
  double discount = 1.0;
  int s = start;
  for (int a : actions) {
    const double r = mdp.Reward(s, a);
    out.rewards.push_back(r);
    out.discounted_return += discount * r;
    discount *= mdp.gamma;
    s = mdp.Next(s, a);
    out.states.push_back(s);
  }
  return out;
}

PathRollout RollPolicy(const TabularMdp& mdp, int start,
                       const std::vector<int>& policy, int steps) {
  std::vector<int> actions;
  int s = start;
  for (int k = 0; k < steps; ++k) {
    actions.push_back(policy[s]);
    s = mdp.Next(s, policy[s]);
  }
  return RollActions(mdp, start, actions);
}

HorizonPlanResult HorizonPlan(const TabularMdp& mdp, int start, int horizon,
                              const std::vector<double>& value_estimate) {
  if (horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "HorizonPlan: horizon must be >= 1");
  }
  if (start < 0 || start >= mdp.num_states) {
    throw Error(ErrorCode::kOutOfRange, "HorizonPlan: start state out of range");
  }
  if (static_cast<int>(value_estimate.size()) != mdp.num_states) {
    ThrowDimensionMismatch("HorizonPlan", mdp.num_states,
                           static_cast<long>(value_estimate.size()));
  }
  if (std::pow(static_cast<double>(mdp.num_actions), horizon) >
      kMaxPlanSequences) {
    throw Error(ErrorCode::kTooLarge,
                "HorizonPlan: A^H exceeds the exhaustive-search limit");
  }
  HorizonPlanResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  std::vector<int> seq(horizon, 0);
  std::vector<int> states(horizon + 1, start);
  std::vector<double> partial(horizon + 1, 0.0);
  std::vector<double> discount(horizon + 1, 1.0);
  for (int h = 1; h <= horizon; ++h) discount[h] = discount[h - 1] * mdp.gamma;
  // odometer over sequences in lexicographic order, reusing shared prefixes
  int depth = 0;
  while (true) {
    for (int h = depth; h < horizon; ++h) {
      const int s = states[h];
      partial[h + 1] = partial[h] + discount[h] * mdp.Reward(s, seq[h]);
      states[h + 1] = mdp.Next(s, seq[h]);
    }
    const double objective =
        partial[horizon] + discount[horizon] * value_estimate[states[horizon]];
    if (objective > best.objective) {
      best.objective = objective;
      best.actions = seq;
    }
    int h = horizon - 1;
    while (h >= 0 && seq[h] == mdp.num_actions - 1) {
      seq[h] = 0;
      --h;
    }
    if (h < 0) break;
    ++seq[h];
    depth = h;
  }
  best.path = RollActions(mdp, start, best.actions);
  return best;
}

double RegretReport::DecompositionGap() const {
  return std::abs(regret -
                  (std::pow(gamma, horizon) * long_term + short_term));
}

double RegretBound(double r_max, double gamma, int horizon, double eps_v,
                   double eps_p) {
  const double gh = std::pow(gamma, horizon);
  return 2.0 * r_max * (1.0 - gh) / (gh * (1.0 - gamma)) + 2.0 * eps_v + eps_p;
}

RegretReport ComputeRegret(const TabularMdp& mdp, int start, int horizon,
                           const std::vector<double>& value_estimate) {
  const ValueIterationResult opt = ValueIteration(mdp);
  const HorizonPlanResult plan =
      HorizonPlan(mdp, start, horizon, value_estimate);
  const std::vector<int> pi = GreedyPolicy(mdp, value_estimate);
  const std::vector<double> v_pi = PolicyValue(mdp, pi);
  const PathRollout star = RollPolicy(mdp, start, opt.policy, horizon);

  RegretReport rep;
  rep.horizon = horizon;
  rep.gamma = mdp.gamma;
  const double gh = std::pow(mdp.gamma, horizon);
  const int s_h = plan.path.states.back();
  const int s_star_h = star.states.back();
  rep.regret = opt.values[start] -
               (plan.path.discounted_return + gh * v_pi[s_h]);
  rep.long_term = opt.values[s_star_h] - v_pi[s_h];
  rep.short_term = star.discounted_return - plan.path.discounted_return;
  for (int s = 0; s < mdp.num_states; ++s) {
    rep.eps_v = std::max(rep.eps_v, std::abs(value_estimate[s] - v_pi[s]));
    rep.eps_p = std::max(rep.eps_p, std::abs(opt.values[s] - v_pi[s]));
  }
  rep.bound = RegretBound(mdp.r_max, mdp.gamma, horizon, rep.eps_v, rep.eps_p);
  return rep;
}

TabularMdp DelayedRewardMdp(const std::vector<double>& immediate,
                            const std::vector<double>& delayed, int depth,
                            double gamma) {
  const int branches = static_cast<int>(immediate.size());
  if (branches < 1 || static_cast<int>(delayed.size()) != branches) {
    throw Error(ErrorCode::kInvalidArgument,
                "DelayedRewardMdp: need matching non-empty reward lists");
  }
  if (depth < 2) {
    throw Error(ErrorCode::kInvalidArgument, "DelayedRewardMdp: depth >= 2");
  }
  TabularMdp mdp;
  mdp.num_actions = branches;
  mdp.num_states = 2 + branches * (depth - 1);
  mdp.gamma = gamma;
  const int absorbing = mdp.num_states - 1;
  // corridor state after k steps (1 <= k < depth) on branch b
  auto corridor = [depth](int b, int k) { return 1 + b * (depth - 1) + (k - 1); };
  const std::size_t n = static_cast<std::size_t>(mdp.num_states) * branches;
  mdp.next.assign(n, absorbing);
  mdp.reward.assign(n, 0.0);
  double r_max = 0.0;
  for (int b = 0; b < branches; ++b) {
    mdp.next[b] = corridor(b, 1);
    mdp.reward[b] = immediate[b];
    for (int k = 1; k < depth; ++k) {
      for (int a = 0; a < branches; ++a) {
        const std::size_t i =
            static_cast<std::size_t>(corridor(b, k)) * branches + a;
        mdp.next[i] = k + 1 < depth ? corridor(b, k + 1) : absorbing;
        mdp.reward[i] = k + 1 < depth ? 0.0 : delayed[b];
      }
    }
    r_max = std::max({r_max, std::abs(immediate[b]), std::abs(delayed[b])});
  }
  mdp.r_max = r_max > 0.0 ? r_max : 1.0;
  mdp.Validate();
  return mdp;
}

TabularMdp DelayedRewardMdp(int branches, int depth, double gamma) {
  std::vector<double> immediate(branches), delayed(branches);
  for (int b = 0; b < branches; ++b) {
    immediate[b] = 0.1 * (branches - b);
    delayed[b] = 1.0 * (b + 1);
  }
  return DelayedRewardMdp(immediate, delayed, depth, gamma);
}

std::vector<double> RankDescending(const std::vector<double>& scores) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

std::vector<std::vector<double>> RankingMatrix(
    const std::vector<RankedTrajectory>& population, int h_max, double gamma) {
  if (h_max < 1) {
    throw Error(ErrorCode::kInvalidArgument, "RankingMatrix: h_max >= 1");
  }
  for (const auto& t : population) {
    if (static_cast<int>(t.rewards.size()) < h_max ||
        static_cast<int>(t.terminal_values.size()) < h_max + 1) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "RankingMatrix: trajectory shorter than h_max");
    }
  }
  std::vector<std::vector<double>> ranks;
  std::vector<double> scores(population.size());
  for (int h = 1; h <= h_max; ++h) {
    const double gh = std::pow(gamma, h);
    for (std::size_t i = 0; i < population.size(); ++i) {
      double ret = 0.0, discount = 1.0;
      for (int k = 0; k < h; ++k) {
        ret += discount * population[i].rewards[k];
        discount *= gamma;
      }
      scores[i] = ret + gh * population[i].terminal_values[h];
    }
    ranks.push_back(RankDescending(scores));
  }
  return ranks;
}

std::vector<double> OracleRanks(const std::vector<RankedTrajectory>& population) {
  std::vector<double> scores;
  for (const auto& t : population) scores.push_back(t.oracle);
  return RankDescending(scores);
}

double KendallTau(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    ThrowDimensionMismatch("KendallTau", static_cast<long>(a.size()),
                           static_cast<long>(b.size()));
  }
  long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double da = a[i] - a[j];
      const double db = b[i] - b[j];
      if (da == 0.0 && db == 0.0) continue;
      if (da == 0.0) {
        ++ties_a;
      } else if (db == 0.0) {
        ++ties_b;
      } else if ((da > 0.0) == (db > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n_a = static_cast<double>(concordant + discordant + ties_b);
  const double n_b = static_cast<double>(concordant + discordant + ties_a);
  if (n_a == 0.0 || n_b == 0.0) return 0.0;
  return static_cast<double>(concordant - discordant) / std::sqrt(n_a * n_b);
}

std::vector<RankedTrajectory> DelayedRewardPopulation(const TabularMdp& mdp,
                                                      int depth,
                                                      bool exact_values) {
  const std::vector<double> v_star = ValueIteration(mdp).values;
  std::vector<RankedTrajectory> population;
  for (int b = 0; b < mdp.num_actions; ++b) {
    std::vector<int> actions(depth, 0);
    actions[0] = b;
    const PathRollout path = RollActions(mdp, 0, actions);
    RankedTrajectory t;
    t.rewards = path.rewards;
    t.terminal_values.assign(depth + 1, 0.0);
    // remaining return from s_h along this trajectory, then V* afterwards
    double tail = v_star[path.states.back()];
    if (exact_values) t.terminal_values[depth] = tail;
    for (int h = depth - 1; h >= 0; --h) {
      tail = path.rewards[h] + mdp.gamma * tail;
      if (exact_values) t.terminal_values[h] = tail;
    }
    t.oracle = tail;
    population.push_back(std::move(t));
  }
  return population;
}

std::vector<RegretSweepRow> RegretSweep(const RegretSweepConfig& cfg) {
  if (cfg.instances < 1 || cfg.max_states < 1 || cfg.max_actions < 1 ||
      cfg.max_horizon < 1 || cfg.gammas.empty() || cfg.max_noise < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "RegretSweep: invalid config");
  }
  std::vector<RegretSweepRow> rows;
  for (int i = 0; i < cfg.instances; ++i) {
    const std::uint64_t seed = DeriveKey({cfg.seed, static_cast<std::uint64_t>(i)});
    CounterRng rng(seed);
    const int s = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.max_states));
    const int a = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.max_actions));
    const int h = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.max_horizon));
    const double gamma = cfg.gammas[static_cast<std::size_t>(i) % cfg.gammas.size()];
    const TabularMdp mdp = RandomMdp(s, a, gamma, DeriveKey({seed, 1}));
    std::vector<double> v_hat = ValueIteration(mdp).values;
    const double amplitude =
        cfg.max_noise * rng.Uniform() * mdp.r_max / (1.0 - gamma);
    for (double& v : v_hat) v += amplitude * (2.0 * rng.Uniform() - 1.0);
    RegretSweepRow row;
    row.seed = seed;
    row.num_states = s;
    row.num_actions = a;
    row.report = ComputeRegret(mdp, 0, h, v_hat);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace aop
