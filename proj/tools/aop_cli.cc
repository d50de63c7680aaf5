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

// Command-line driver over the C interface.
//
//   aop run    --spec s.json [--seed N] [--out DIR] [--mode M] [--override k=v]...
//   aop sweep  --spec s.json --sigma 4,8,14 --eps 10,25,40
//   aop probe  --spec s.json [--every 250] [--horizon 200]
//   aop report --out DIR [--window 100] LOG...
//   aop regret-sweep [--instances 100] [--seed 0] [--out regret.csv]
//
// AOP_WORKERS sets the number of seeds run concurrently.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aop/aop.h"

namespace {

struct Common {
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string mode;
  std::vector<std::string> overrides;
};

void AddCommon(CLI::App* cmd, Common* c) {
  cmd->add_option("--spec", c->spec_path, "experiment spec (JSON)");
  cmd->add_option("--seed", c->seed, "run this single seed instead of the spec's list");
  cmd->add_option("--out", c->out, "output directory");
  cmd->add_option("--mode", c->mode, "AOP-TD3, AOP-BC, POLO, MPC-8, MPC-3 or TD3");
  cmd->add_option("--override", c->overrides, "key=value, repeatable")
      ->allow_extra_args(false);
}

int Report(aop_status status, const char* what) {
  if (status == AOP_OK) return 0;
  std::fprintf(stderr, "aop %s: %s: %s\n", what, aop_status_name(status),
               aop_last_error());
  return status == AOP_ERR_INVALID_ARGUMENT || status == AOP_ERR_PARSE ? 2 : 1;
}

using ExperimentPtr = std::unique_ptr<aop_experiment, decltype(&aop_experiment_free)>;

// Builds the spec from --spec and the override flags; returns an exit code.
int BuildSpec(const Common& c, ExperimentPtr* out) {
  aop_experiment* raw = nullptr;
  aop_status st = c.spec_path.empty() ? aop_experiment_new(&raw)
                                      : aop_experiment_load(c.spec_path.c_str(), &raw);
  if (int rc = Report(st, "spec")) return rc;
  out->reset(raw);
  std::vector<std::string> assignments;
  if (!c.mode.empty()) assignments.push_back("mode=" + c.mode);
  if (!c.out.empty()) assignments.push_back("out=" + c.out);
  assignments.insert(assignments.end(), c.overrides.begin(), c.overrides.end());
  for (const auto& a : assignments) {
    if (int rc = Report(aop_experiment_assign(raw, a.c_str()), "spec")) return rc;
  }
  if (c.seed) {
    const std::uint64_t s = *c.seed;
    if (int rc = Report(aop_experiment_set_seeds(raw, &s, 1), "spec")) return rc;
  }
  return 0;
}

int RunCommand(const Common& c) {
  ExperimentPtr spec(nullptr, aop_experiment_free);
  if (int rc = BuildSpec(c, &spec)) return rc;
  aop_summary* summary = nullptr;
  if (int rc = Report(aop_run(spec.get(), 0, &summary), "run")) return rc;
  std::unique_ptr<aop_summary, decltype(&aop_summary_free)> guard(summary,
                                                                  aop_summary_free);
  for (size_t i = 0; i < aop_summary_seed_count(summary); ++i) {
    std::uint64_t seed = 0;
    double reward = 0.0, fraction = 0.0;
    aop_summary_seed(summary, i, &seed, &reward, &fraction);
    std::printf("seed %llu  reward %.4f  planning %.4f\n",
                static_cast<unsigned long long>(seed), reward, fraction);
  }
  double mean = 0.0, sd = 0.0, fraction = 0.0;
  aop_summary_stats(summary, &mean, &sd, &fraction);
  std::printf("mean reward %.4f +- %.4f  planning fraction %.4f\n", mean, sd, fraction);
  if (size_t failed = aop_summary_failures(summary)) {
    std::fprintf(stderr, "aop run: %zu seed(s) aborted, see the logs\n", failed);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive online planning experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", aop_version());

  Common run_opts, sweep_opts, probe_opts;
  CLI::App* run = app.add_subcommand("run", "run an experiment spec");
  AddCommon(run, &run_opts);

  CLI::App* sweep = app.add_subcommand("sweep", "threshold grid over sigma_thres x eps_thres");
  AddCommon(sweep, &sweep_opts);
  std::vector<double> sigmas{4, 8, 14}, eps{10, 25, 40};
  sweep->add_option("--sigma", sigmas, "sigma_thres values")->delimiter(',');
  sweep->add_option("--eps", eps, "eps_thres values")->delimiter(',');

  CLI::App* probe = app.add_subcommand("probe", "prior-only degradation probe");
  AddCommon(probe, &probe_opts);
  std::int64_t every = 250;
  int horizon = 200;
  probe->add_option("--every", every, "steps between probes");
  probe->add_option("--horizon", horizon, "probe rollout length");

  CLI::App* report = app.add_subcommand("report", "figure-data CSVs from JSONL logs");
  std::string report_out = "report";
  int window = 100;
  std::vector<std::string> logs;
  report->add_option("--out", report_out, "output directory");
  report->add_option("--window", window, "moving-average window");
  report->add_option("logs", logs, "JSONL logs")->required();

  CLI::App* regret = app.add_subcommand("regret-sweep", "random tabular regret sweep");
  int instances = 100;
  std::uint64_t regret_seed = 0;
  std::string regret_out = "regret.csv";
  regret->add_option("--instances", instances, "number of random MDPs");
  regret->add_option("--seed", regret_seed, "sweep seed");
  regret->add_option("--out", regret_out, "CSV path");

  CLI11_PARSE(app, argc, argv);

  if (*run) return RunCommand(run_opts);
  if (*sweep) {
    ExperimentPtr spec(nullptr, aop_experiment_free);
    if (int rc = BuildSpec(sweep_opts, &spec)) return rc;
    size_t rows = 0;
    if (int rc = Report(aop_sweep_thresholds(spec.get(), sigmas.data(), sigmas.size(),
                                             eps.data(), eps.size(), 0, &rows),
                        "sweep")) {
      return rc;
    }
    std::printf("%zu grid cells written\n", rows);
    return 0;
  }
  if (*probe) {
    ExperimentPtr spec(nullptr, aop_experiment_free);
    if (int rc = BuildSpec(probe_opts, &spec)) return rc;
    size_t rows = 0;
    if (int rc = Report(aop_probe(spec.get(), every, horizon, 0, &rows), "probe")) {
      return rc;
    }
    std::printf("%zu probe rows written\n", rows);
    return 0;
  }
  if (*report) {
    std::vector<const char*> paths;
    for (const auto& p : logs) paths.push_back(p.c_str());
    return Report(aop_report(paths.data(), paths.size(), report_out.c_str(), window),
                  "report");
  }
  if (*regret) {
    aop_regret_stats stats{};
    if (int rc = Report(aop_regret_sweep(instances, regret_seed, regret_out.c_str(), &stats),
                        "regret-sweep")) {
      return rc;
    }
    std::printf("%d instances  bound violations %d  SR<0 in %d  max gap %.3g\n",
                stats.instances, stats.violations, stats.negative_short_term,
                stats.max_decomposition_gap);
    return stats.violations == 0 ? 0 : 1;
  }
  return 0;
}
