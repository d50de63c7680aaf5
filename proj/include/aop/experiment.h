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

#ifndef AOP_EXPERIMENT_H_
#define AOP_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aop/agent.h"
#include "aop/env.h"
#include "aop/maze.h"
#include "aop/regret.h"

namespace aop {

enum class EnvKind { kMaze, kSinkChain };

struct EnvSpec {
  EnvKind kind = EnvKind::kMaze;
  ScheduleKind schedule = ScheduleKind::kChangingWorlds;
  RewardMode reward = RewardMode::kDense;
  std::uint64_t schedule_seed = 0;
  std::int64_t period = 1000;
};

// A run is a pure function of this record (see docs/formats.md).
struct ExperimentSpec {
  EnvSpec env;
  AgentMode mode = AgentMode::kAopBc;
  // dotted AgentConfig paths, e.g. "horizon.sigma_thres"; applied in key order
  nlohmann::json overrides = nlohmann::json::object();
  std::int64_t lifetime = 10000;
  std::string out_dir = "runs";
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};

  nlohmann::json ToJson() const;
  // Field-level kParse / kInvalidArgument errors.
  static ExperimentSpec FromJson(const nlohmann::json& j);
  static ExperimentSpec Load(const std::string& path);
  void Validate() const;
};

// `value` may be any JSON scalar; strings are parsed as JSON first.
void ApplyOverride(AgentConfig& cfg, const std::string& key,
                   const nlohmann::json& value);
std::vector<std::string> OverrideKeys();

// "key=value" -> spec.overrides (or the top-level fields mode, lifetime,
// period, schedule_seed, reward, schedule, env).
void ApplyAssignment(ExperimentSpec& spec, const std::string& assignment);

AgentConfig BuildAgentConfig(const ExperimentSpec& spec, std::uint64_t seed);

// World schedule for one run seed; covers the whole lifetime.
WorldSchedule BuildSchedule(const EnvSpec& env, std::int64_t lifetime,
                            std::uint64_t seed);
StateVec InitialStateFor(const World& world);
LifelongEnv MakeEnvironment(const EnvSpec& env, std::int64_t lifetime,
                            std::uint64_t seed);

struct SeedSummary {
  std::uint64_t seed = 0;
  double average_reward = 0.0;
  double planning_fraction = 0.0;
  std::int64_t steps = 0;
  std::vector<double> world_rewards;  // mean reward per world segment
  std::string error;
};

struct RunSummary {
  AgentMode mode = AgentMode::kAopBc;
  std::vector<SeedSummary> seeds;
  double mean_reward = 0.0;
  double std_reward = 0.0;  // population std over seeds
  double mean_fraction = 0.0;
  double median_fraction = 0.0;

  bool ok() const;
};

SeedSummary SummarizeSeed(std::uint64_t seed, const LifetimeLog& log);
RunSummary Summarize(AgentMode mode, std::vector<SeedSummary> seeds);

struct RunOptions {
  // concurrent seeds; 0 reads AOP_WORKERS (default 1)
  int workers = 0;
  bool write_files = true;
  // keep the full per-step logs in memory (RunResult::logs)
  bool keep_logs = false;
};

int WorkersFromEnvironment();

struct RunResult {
  RunSummary summary;
  std::vector<LifetimeLog> logs;  // one per seed when keep_logs
};

// Writes <out>/spec.json, <out>/seed_<s>.jsonl and <out>/summary.csv.
RunResult RunExperiment(const ExperimentSpec& spec, const RunOptions& options = {});

void WriteLifetimeLog(const std::string& path, const LifetimeLog& log);
LifetimeLog LoadLifetimeLog(const std::string& path);
void WriteSummaryCsv(const std::string& path, const RunSummary& summary);

struct SweepRow {
  double sigma_thres = 0.0;
  double eps_thres = 0.0;
  RunSummary summary;
};

// One run per (sigma, eps) cell, in row-major order; writes <out>/sweep.csv
// and one sub-directory per cell when write_files.
std::vector<SweepRow> SweepThresholds(const ExperimentSpec& base,
                                      const std::vector<double>& sigmas,
                                      const std::vector<double>& eps,
                                      const RunOptions& options = {});
void WriteSweepCsv(const std::string& path, const std::vector<SweepRow>& rows);

struct ProbeOptions {
  std::int64_t every = 250;
  int horizon = 200;
};

struct ProbeRow {
  std::uint64_t seed = 0;
  std::int64_t t = 0;
  int world_index = 0;
  double score = 0.0;  // mean per-step reward of the prior alone
};

// Runs the spec and periodically rolls the prior alone from a fixed probe
// state in a frozen copy of the current world.  Writes <out>/probe.csv.
std::vector<ProbeRow> DegradationProbe(const ExperimentSpec& spec,
                                       const ProbeOptions& probe = {},
                                       const RunOptions& options = {});
void WriteProbeCsv(const std::string& path, const std::vector<ProbeRow>& rows);

inline constexpr int kDefaultReportWindow = 100;

// Emits reward_curve.csv, uncertainty.csv, planning_since_change.csv and
// world_segments.csv into out_dir.  window <= 0 selects the default.
void WriteReport(const std::vector<std::string>& log_paths,
                 const std::string& out_dir, int window = kDefaultReportWindow);

void WriteRegretCsv(const std::string& path,
                    const std::vector<RegretSweepRow>& rows);

}  // namespace aop

#endif  // AOP_EXPERIMENT_H_
