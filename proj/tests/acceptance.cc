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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aop/agent.h"
#include "aop/analysis.h"
#include "aop/errors.h"
#include "aop/experiment.h"
#include "aop/mlp.h"
#include "aop/regret.h"
#include "aop/rng.h"
#include "aop/value_ensemble.h"

namespace aop {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double Median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double MeanOf(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

double StdOf(const std::vector<double>& xs) {
  const double m = MeanOf(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / xs.size());
}

// ---------------------------------------------------------------------------
// 1. gradients

double WeightedOutput(const Mlp& net, const Batch& x, const Batch& c) {
  return (net.Forward(x).array() * c.array()).sum();
}

Outcome Gradients() {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> depth(1, 3), width(1, 12);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> sizes{width(gen)};
    const int hidden = depth(gen);
    for (int l = 0; l < hidden; ++l) sizes.push_back(width(gen));
    sizes.push_back(width(gen));
    Mlp net = Mlp::Random(sizes, gen);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    for (double& p : net.parameters()) p += jitter(gen);
    const Batch x = Batch::Random(4, sizes.front());
    const Batch c = Batch::Random(4, sizes.back());

    Mlp::Tape tape;
    net.Forward(x, &tape);
    Vector grad;
    net.Backward(tape, c, &grad);
    auto params = net.parameters();
    const double h = 1e-5;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = params[i];
      params[i] = keep + h;
      const double up = WeightedOutput(net, x, c);
      params[i] = keep - h;
      const double down = WeightedOutput(net, x, c);
      params[i] = keep;
      const double fd = (up - down) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
      worst = std::max(worst, std::abs(fd - grad[i]) / denom);
    }
  }
  return {worst < 1e-4, Format("max relative error %.3g over 100 networks", worst)};
}

// ---------------------------------------------------------------------------
// 2. aggregation bounds

Outcome AggregationBounds() {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> members(2, 8);
  std::uniform_real_distribution<double> logk(-4.0, 1.0), coord(-1.0, 2.0);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    EnsembleConfig cfg;
    cfg.size = members(gen);
    cfg.kappa = std::pow(10.0, logk(gen));
    cfg.hidden = {16, 16};
    const ValueEnsemble ens(4, cfg, static_cast<std::uint64_t>(trial));
    const double obs[4] = {coord(gen), coord(gen), coord(gen), coord(gen)};
    std::vector<double> v(ens.size());
    ens.MemberValues(obs, v);
    const double agg = ens.Aggregate(obs);
    const double mean = Mean(v);
    const double max = *std::max_element(v.begin(), v.end());
    if (!(mean - 1e-12 <= agg && agg <= max + 1e-12)) ++violations;
  }
  return {violations == 0,
          Format("%d of 1000 ensemble/state pairs outside [mean, max]", violations)};
}

// ---------------------------------------------------------------------------
// 3. reductions

// Plain MPPI with zero terminal value, fixed horizon and a fixed number of
// iterations, warm-started from the shifted previous plan.
class ReferenceMpc {
 public:
  ReferenceMpc(std::uint64_t seed, int iterations, double gamma)
      : key_(seed), iterations_(iterations), gamma_(gamma) {}

  ActionVec Act(const World& world, const StateVec& state, std::int64_t t) {
    std::vector<ActionVec> base(kHorizon, ActionVec{});
    for (std::size_t k = 1; k < previous_.size(); ++k) base[k - 1] = previous_[k];
    for (int it = 1; it <= iterations_; ++it) {
      std::vector<std::vector<ActionVec>> pop(kPop, base);
      std::vector<double> returns(kPop);
      for (int i = 0; i < kPop; ++i) {
        if (i > 0) {
          CounterRng rng({key_, static_cast<std::uint64_t>(t),
                          static_cast<std::uint64_t>(it),
                          static_cast<std::uint64_t>(i)});
          std::normal_distribution<double> noise(0.0, kNoise);
          for (ActionVec& a : pop[i]) {
            for (int d = 0; d < 2; ++d) a[d] = std::clamp(a[d] + noise(rng), -1.0, 1.0);
          }
        }
        returns[i] = Return(world, state, pop[i]);
      }
      const double best = *std::max_element(returns.begin(), returns.end());
      std::vector<double> w(kPop);
      double total = 0.0;
      for (int i = 0; i < kPop; ++i) {
        w[i] = std::exp((returns[i] - best) / kLambda);
        total += w[i];
      }
      for (double& x : w) x /= total;
      for (int h = 0; h < kHorizon; ++h) {
        for (int d = 0; d < 2; ++d) {
          double acc = 0.0;
          for (int i = 0; i < kPop; ++i) acc += w[i] * pop[i][h][d];
          base[h][d] = acc;
        }
      }
    }
    previous_ = base;
    return base.front();
  }

  static constexpr int kHorizon = 80;
  static constexpr int kPop = 40;
  static constexpr double kNoise = 0.1;
  static constexpr double kLambda = 0.01;

 private:
  double Return(const World& world, StateVec s, const std::vector<ActionVec>& actions) const {
    double total = 0.0, discount = 1.0;
    for (const ActionVec& a : actions) {
      const Transition tr = world.Step(s, a);
      total += discount * tr.reward;
      discount *= gamma_;
      s = tr.next;
    }
    return total;
  }

  std::uint64_t key_;
  int iterations_;
  double gamma_;
  std::vector<ActionVec> previous_;
};

Outcome Reductions() {
  const std::int64_t steps = 200;
  const std::uint64_t seed = 3;
  EnvSpec env;
  env.period = 50;

  LifelongEnv agent_env = MakeEnvironment(env, steps, seed);
  AgentConfig cfg = AgentConfig::ForMode(AgentMode::kMpc8);
  cfg.seed = seed;
  const LifetimeLog log = RunLifetime(agent_env, cfg, steps);
  if (!log.ok()) return {false, "MPC-8 run failed: " + log.error};

  LifelongEnv ref_env = MakeEnvironment(env, steps, seed);
  ReferenceMpc ref(DeriveKey({seed, 1}), 8, cfg.gamma);
  int mismatches = 0;
  for (std::int64_t t = 0; t < steps; ++t) {
    const ActionVec a = ref.Act(*ref_env.model(), ref_env.state(), t);
    if (a != log.steps[t].action) ++mismatches;
    ref_env.Step(a);
  }

  EnvSpec mpc3_env;
  LifelongEnv env3 = MakeEnvironment(mpc3_env, 40, 0);
  AgentConfig cfg3 = AgentConfig::ForMode(AgentMode::kMpc3);
  const LifetimeLog log3 = RunLifetime(env3, cfg3, 40);
  const double fraction = log3.ok() ? PlanningFraction(log3) : -1.0;
  return {mismatches == 0 && fraction == 0.375,
          Format("%d of %lld actions differ from reference MPC-8; MPC-3 fraction %.6f",
                 mismatches, static_cast<long long>(steps), fraction)};
}

// ---------------------------------------------------------------------------
// 4. regret bound

Outcome RegretLemma() {
  const auto t0 = std::chrono::steady_clock::now();
  RegretSweepConfig cfg;
  cfg.instances = 100;
  const auto rows = RegretSweep(cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  int violations = 0, negative = 0;
  double gap = 0.0;
  for (const auto& r : rows) {
    violations += !r.report.Holds();
    negative += r.report.short_term < 0.0;
    gap = std::max(gap, r.report.DecompositionGap());
  }
  return {violations == 0 && gap < 1e-9 && negative > 0 && secs < 120.0,
          Format("%zu instances, %d bound violations, max gap %.2g, %d with SR < 0, %.1f s",
                 rows.size(), violations, gap, negative, secs)};
}

// ---------------------------------------------------------------------------
// 10. horizon ranking

Outcome HorizonRanking() {
  const int depth = 6;
  const TabularMdp mdp = DelayedRewardMdp(4, depth, 0.95);
  const auto pop = DelayedRewardPopulation(mdp, depth, false);
  const auto oracle = OracleRanks(pop);
  const auto ranks = RankingMatrix(pop, depth, mdp.gamma);
  const double tau1 = KendallTau(ranks.front(), oracle);
  const double tau_full = KendallTau(ranks.back(), oracle);
  const auto exact = DelayedRewardPopulation(mdp, depth, true);
  const auto exact_ranks = RankingMatrix(exact, depth, mdp.gamma);
  const auto exact_oracle = OracleRanks(exact);
  bool perfect = true;
  for (const auto& col : exact_ranks) perfect = perfect && col == exact_oracle;
  return {tau1 < tau_full && perfect,
          Format("tau(H=1) %.2f, tau(H=%d) %.2f, exact values rank perfectly: %s", tau1,
                 depth, tau_full, perfect ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 5-9. lifelong maze experiments

struct Settings {
  std::int64_t lifetime = 10000;
  int seeds = 5;
  int grid_seeds = 3;
  std::string out = "acceptance_runs";
};

struct ModeRun {
  RunSummary summary;
  std::vector<LifetimeLog> logs;
};

ModeRun RunMode(const Settings& s, AgentMode mode, const std::string& name,
                int seeds, const nlohmann::json& overrides = nlohmann::json::object()) {
  ExperimentSpec spec;
  spec.mode = mode;
  spec.lifetime = s.lifetime;
  spec.seeds.clear();
  for (int i = 0; i < seeds; ++i) spec.seeds.push_back(static_cast<std::uint64_t>(i));
  spec.overrides = overrides;
  spec.out_dir = (fs::path(s.out) / name).string();
  RunOptions opt;
  opt.keep_logs = true;
  const auto t0 = std::chrono::steady_clock::now();
  RunResult r = RunExperiment(spec, opt);
  std::printf("  [%s: mean reward %.4f, std %.4f, median fraction %.4f, %.0f s]\n",
              name.c_str(), r.summary.mean_reward, r.summary.std_reward,
              r.summary.median_fraction,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  std::fflush(stdout);
  return {std::move(r.summary), std::move(r.logs)};
}

Outcome ComputeAdaptation(const ModeRun& bc) {
  if (!bc.summary.ok()) return {false, "AOP-BC run failed"};
  std::vector<double> fractions;
  int hits = 0, worlds = 0;
  std::string per_seed;
  for (const LifetimeLog& log : bc.logs) {
    fractions.push_back(PlanningFraction(log));
    const auto q = PlanningByQuartile(log);
    int seed_hits = 0;
    for (const auto& w : q) seed_hits += w.last < 0.5 * w.first;
    hits += seed_hits;
    worlds += static_cast<int>(q.size());
    per_seed += Format(" %d/%zu", seed_hits, q.size());
  }
  const double median = Median(fractions);
  const bool majority = 2 * hits > worlds;
  return {median < 0.4 && majority,
          Format("median planning fraction %.4f; last quartile < 50%% of first in %d of %d "
                 "worlds (per seed:%s)",
                 median, hits, worlds, per_seed.c_str())};
}

Outcome UncertaintySpike(const ModeRun& bc) {
  if (!bc.summary.ok()) return {false, "AOP-BC run failed"};
  std::vector<double> shares;
  std::string per_seed;
  for (const LifetimeLog& log : bc.logs) {
    shares.push_back(SpikeShare(BellmanAroundChanges(log, 50), 2.0));
    per_seed += Format(" %.2f", shares.back());
  }
  const double median = Median(shares);
  return {median >= 0.6,
          Format("median share of changes with a >2x Bellman error spike %.2f (per seed:%s)",
                 median, per_seed.c_str())};
}

Outcome Parity(const ModeRun& bc, const ModeRun& mpc) {
  if (!bc.summary.ok() || !mpc.summary.ok()) return {false, "run failed"};
  const double gap = bc.summary.mean_reward - mpc.summary.mean_reward;
  return {std::abs(gap) <= 0.15,
          Format("AOP-BC %.4f vs MPC-8 %.4f (difference %.4f)", bc.summary.mean_reward,
                 mpc.summary.mean_reward, gap)};
}

Outcome Degradation(const ModeRun& bc, const ModeRun& td3) {
  if (!bc.summary.ok() || !td3.summary.ok()) return {false, "run failed"};
  const double gap = bc.summary.mean_reward - td3.summary.mean_reward;
  return {gap >= 0.3, Format("TD3 %.4f vs AOP-BC %.4f (gap %.4f)", td3.summary.mean_reward,
                             bc.summary.mean_reward, gap)};
}

Outcome ThresholdRobustness(const Settings& s, const ModeRun& bc) {
  const std::vector<double> sigmas{4, 8, 14}, eps{10, 25, 40};
  const int n = std::min(s.grid_seeds, static_cast<int>(bc.logs.size()));
  double lo = -1e300, hi = 1e300;
  std::string cells;
  bool ok = true;
  for (double sg : sigmas) {
    for (double e : eps) {
      std::vector<double> rewards;
      if (sg == 8 && e == 25) {
        for (int i = 0; i < n; ++i) rewards.push_back(AverageLifetimeReward(bc.logs[i]));
      } else {
        const ModeRun cell =
            RunMode(s, AgentMode::kAopBc, Format("grid_sigma_%g_eps_%g", sg, e), n,
                    {{"horizon.sigma_thres", sg}, {"horizon.eps_thres", e}});
        ok = ok && cell.summary.ok();
        for (const auto& seed : cell.summary.seeds) rewards.push_back(seed.average_reward);
      }
      const double m = MeanOf(rewards), sd = StdOf(rewards);
      lo = std::max(lo, m - sd);
      hi = std::min(hi, m + sd);
      cells += Format(" (%g,%g)=%.3f+-%.3f", sg, e, m, sd);
    }
  }
  return {ok && lo <= hi,
          Format("common band [%.4f, %.4f] %s;%s", lo, hi, lo <= hi ? "non-empty" : "EMPTY",
                 cells.c_str())};
}

int Main(int argc, char** argv) {
  Settings s;
  std::set<int> only;
  CLI::App app{"acceptance checks"};
  app.add_option("--lifetime", s.lifetime, "steps per maze run");
  app.add_option("--seeds", s.seeds, "seeds for the maze runs");
  app.add_option("--grid-seeds", s.grid_seeds, "seeds per threshold grid cell");
  app.add_option("--out", s.out, "directory for run logs");
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    if (!only.empty() && !only.count(id)) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("%s %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(1, "gradient-check", Gradients);
  report(2, "aggregation-bounds", AggregationBounds);
  report(3, "reduction-equivalence", Reductions);
  report(4, "regret-bound", RegretLemma);

  auto wants = [&](std::initializer_list<int> ids) {
    if (only.empty()) return true;
    for (int id : ids) if (only.count(id)) return true;
    return false;
  };
  ModeRun bc, mpc, td3;
  if (wants({5, 6, 7, 8, 9})) bc = RunMode(s, AgentMode::kAopBc, "aop_bc", s.seeds);
  if (wants({7})) mpc = RunMode(s, AgentMode::kMpc8, "mpc8", s.seeds);
  if (wants({8})) td3 = RunMode(s, AgentMode::kTd3Only, "td3", s.seeds);
  report(5, "compute-adaptation", [&] { return ComputeAdaptation(bc); });
  report(6, "uncertainty-spike", [&] { return UncertaintySpike(bc); });
  report(7, "performance-parity", [&] { return Parity(bc, mpc); });
  report(8, "policy-degradation", [&] { return Degradation(bc, td3); });
  report(9, "threshold-robustness", [&] { return ThresholdRobustness(s, bc); });
  report(10, "horizon-ranking", HorizonRanking);

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace aop

int main(int argc, char** argv) { return aop::Main(argc, argv); }
