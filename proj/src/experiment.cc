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

#include "aop/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "aop/analysis.h"
#include "aop/errors.h"
#include "aop/rng.h"
#include "aop/sink_chain.h"

namespace aop {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void FieldError(const std::string& field, const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, "spec field '" + field + "': " + msg);
}

int AsInt(const std::string& key, const json& v) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) {
    return static_cast<int>(v.get<double>());
  }
  FieldError(key, "expected an integer");
}

double AsDouble(const std::string& key, const json& v) {
  if (!v.is_number()) FieldError(key, "expected a number");
  return v.get<double>();
}

bool AsBool(const std::string& key, const json& v) {
  if (!v.is_boolean()) FieldError(key, "expected true or false");
  return v.get<bool>();
}

std::vector<int> AsSizes(const std::string& key, const json& v) {
  if (!v.is_array() || v.empty()) FieldError(key, "expected a non-empty array");
  std::vector<int> out;
  for (const json& x : v) {
    const int n = AsInt(key, x);
    if (n <= 0) FieldError(key, "layer widths must be positive");
    out.push_back(n);
  }
  return out;
}

using Setter = std::function<void(AgentConfig&, const std::string&, const json&)>;

const std::map<std::string, Setter>& OverrideTable() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
#define AOP_INT(path, field) \
  t[path] = [](AgentConfig& c, const std::string& k, const json& v) { c.field = AsInt(k, v); }
#define AOP_DOUBLE(path, field) \
  t[path] = [](AgentConfig& c, const std::string& k, const json& v) { c.field = AsDouble(k, v); }
#define AOP_BOOL(path, field) \
  t[path] = [](AgentConfig& c, const std::string& k, const json& v) { c.field = AsBool(k, v); }
#define AOP_SIZES(path, field) \
  t[path] = [](AgentConfig& c, const std::string& k, const json& v) { c.field = AsSizes(k, v); }
    AOP_DOUBLE("gamma", gamma);
    AOP_INT("update_every", update_every);
    AOP_INT("value_steps", value_steps);
    AOP_INT("value_batch", value_batch);
    AOP_INT("bc_steps", bc_steps);
    AOP_INT("bc_batch", bc_batch);
    AOP_INT("td3_steps", td3_steps);
    AOP_INT("td3_batch", td3_batch);
    AOP_INT("value_capacity", value_capacity);
    AOP_INT("policy_capacity", policy_capacity);
    AOP_DOUBLE("planner.lambda", planner.lambda);
    AOP_DOUBLE("planner.noise_std", planner.noise_std);
    AOP_INT("planner.pop_size", planner.pop_size);
    AOP_INT("planner.max_iters", planner.max_iters);
    AOP_DOUBLE("planner.delta_thres_first", planner.delta_thres_first);
    AOP_DOUBLE("planner.delta_thres_later", planner.delta_thres_later);
    AOP_DOUBLE("planner.eps_plan", planner.eps_plan);
    AOP_BOOL("planner.keep_elite", planner.keep_elite);
    AOP_BOOL("planner.reuse_plan", planner.reuse_plan);
    AOP_INT("planner.workers", planner.workers);
    AOP_INT("horizon.h_full", horizon.h_full);
    AOP_INT("horizon.h_min", horizon.h_min);
    AOP_DOUBLE("horizon.sigma_thres", horizon.sigma_thres);
    AOP_DOUBLE("horizon.eps_thres", horizon.eps_thres);
    AOP_INT("ensemble.size", ensemble.size);
    AOP_DOUBLE("ensemble.kappa", ensemble.kappa);
    AOP_INT("ensemble.n_step", ensemble.n_step);
    AOP_SIZES("ensemble.hidden", ensemble.hidden);
    AOP_DOUBLE("ensemble.learning_rate", ensemble.adam.learning_rate);
    AOP_SIZES("bc.hidden", bc.hidden);
    AOP_DOUBLE("bc.learning_rate", bc.adam.learning_rate);
    AOP_SIZES("td3.hidden", td3.hidden);
    AOP_DOUBLE("td3.learning_rate", td3.adam.learning_rate);
    AOP_DOUBLE("td3.target_noise", td3.target_noise);
    AOP_DOUBLE("td3.target_noise_clip", td3.target_noise_clip);
    AOP_INT("td3.policy_delay", td3.policy_delay);
    AOP_DOUBLE("td3.tau", td3.tau);
#undef AOP_INT
#undef AOP_DOUBLE
#undef AOP_BOOL
#undef AOP_SIZES
    return t;
  }();
  return table;
}

const char* ScheduleName(ScheduleKind k) {
  return k == ScheduleKind::kChangingWorlds ? "CW" : "NS";
}

ScheduleKind ParseSchedule(const std::string& s) {
  if (s == "CW") return ScheduleKind::kChangingWorlds;
  if (s == "NS") return ScheduleKind::kNovelStates;
  FieldError("env.schedule", "expected CW or NS, got '" + s + "'");
}

RewardMode ParseReward(const std::string& s) {
  if (s == "dense") return RewardMode::kDense;
  if (s == "sparse") return RewardMode::kSparse;
  FieldError("env.reward", "expected dense or sparse, got '" + s + "'");
}

EnvKind ParseEnvKind(const std::string& s) {
  if (s == "maze") return EnvKind::kMaze;
  if (s == "sink_chain") return EnvKind::kSinkChain;
  FieldError("env.kind", "expected maze or sink_chain, got '" + s + "'");
}

AgentMode ParseModeField(const std::string& s) {
  const auto m = ParseAgentMode(s);
  if (!m) {
    FieldError("mode",
               "expected AOP-TD3, AOP-BC, POLO, MPC-8, MPC-3 or TD3, got '" +
                   s + "'");
  }
  return *m;
}

json ParseScalar(const std::string& text) {
  json v = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (v.is_discarded()) return json(text);
  return v;
}

template <typename T>
T Get(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    FieldError(field, "wrong type");
  }
}

std::string Fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::ofstream OpenOut(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  return out;
}

// Runs job(i) for i in [0, n) on up to `workers` threads.
void ParallelFor(int n, int workers, const std::function<void(int)>& job) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++) {
          try {
            job(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

int ResolveWorkers(const RunOptions& options) {
  return options.workers > 0 ? options.workers : WorkersFromEnvironment();
}

}  // namespace

json ExperimentSpec::ToJson() const {
  json seeds_json = json::array();
  for (auto s : seeds) seeds_json.push_back(s);
  return {
      {"env",
       {{"kind", env.kind == EnvKind::kMaze ? "maze" : "sink_chain"},
        {"schedule", ScheduleName(env.schedule)},
        {"reward", env.reward == RewardMode::kDense ? "dense" : "sparse"},
        {"schedule_seed", env.schedule_seed},
        {"period", env.period}}},
      {"mode", AgentModeName(mode)},
      {"overrides", overrides},
      {"lifetime", lifetime},
      {"out", out_dir},
      {"seeds", seeds_json},
  };
}

ExperimentSpec ExperimentSpec::FromJson(const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kParse, "spec: top level must be a JSON object");
  }
  ExperimentSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "env") {
      if (!value.is_object()) FieldError("env", "expected an object");
      for (const auto& [ek, ev] : value.items()) {
        const std::string field = "env." + ek;
        if (ek == "kind") {
          spec.env.kind = ParseEnvKind(Get<std::string>(ev, field));
        } else if (ek == "schedule") {
          spec.env.schedule = ParseSchedule(Get<std::string>(ev, field));
        } else if (ek == "reward") {
          spec.env.reward = ParseReward(Get<std::string>(ev, field));
        } else if (ek == "schedule_seed") {
          spec.env.schedule_seed = Get<std::uint64_t>(ev, field);
        } else if (ek == "period") {
          spec.env.period = Get<std::int64_t>(ev, field);
        } else {
          FieldError(field, "unknown field");
        }
      }
    } else if (key == "mode") {
      spec.mode = ParseModeField(Get<std::string>(value, key));
    } else if (key == "overrides") {
      if (!value.is_object()) FieldError(key, "expected an object");
      spec.overrides = value;
    } else if (key == "lifetime") {
      spec.lifetime = Get<std::int64_t>(value, key);
    } else if (key == "out") {
      spec.out_dir = Get<std::string>(value, key);
    } else if (key == "seeds") {
      spec.seeds = Get<std::vector<std::uint64_t>>(value, key);
    } else {
      FieldError(key, "unknown field");
    }
  }
  spec.Validate();
  return spec;
}

ExperimentSpec ExperimentSpec::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read spec " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kParse, "spec " + path + ": invalid JSON");
  return FromJson(j);
}

void ExperimentSpec::Validate() const {
  if (lifetime <= 0) FieldError("lifetime", "must be positive");
  if (env.period <= 0) FieldError("env.period", "must be positive");
  if (seeds.empty()) FieldError("seeds", "must not be empty");
  if (out_dir.empty()) FieldError("out", "must not be empty");
  AgentConfig cfg = BuildAgentConfig(*this, seeds.front());
  try {
    cfg.Validate();
  } catch (const Error& e) {
    FieldError("overrides", e.what());
  }
}

void ApplyOverride(AgentConfig& cfg, const std::string& key, const json& value) {
  const auto& table = OverrideTable();
  const auto it = table.find(key);
  if (it == table.end()) FieldError("overrides." + key, "unknown key");
  const json v = value.is_string() ? ParseScalar(value.get<std::string>()) : value;
  it->second(cfg, "overrides." + key, v);
}

std::vector<std::string> OverrideKeys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : OverrideTable()) keys.push_back(k);
  return keys;
}

void ApplyAssignment(ExperimentSpec& spec, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "override '" + assignment + "': expected key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  const json value = ParseScalar(text);
  if (key == "mode") {
    spec.mode = ParseModeField(text);
  } else if (key == "lifetime") {
    spec.lifetime = Get<std::int64_t>(value, key);
  } else if (key == "period" || key == "env.period") {
    spec.env.period = Get<std::int64_t>(value, "env.period");
  } else if (key == "schedule_seed" || key == "env.schedule_seed") {
    spec.env.schedule_seed = Get<std::uint64_t>(value, "env.schedule_seed");
  } else if (key == "reward" || key == "env.reward") {
    spec.env.reward = ParseReward(text);
  } else if (key == "schedule" || key == "env.schedule") {
    spec.env.schedule = ParseSchedule(text);
  } else if (key == "env" || key == "env.kind") {
    spec.env.kind = ParseEnvKind(text);
  } else if (key == "out") {
    spec.out_dir = text;
  } else {
    AgentConfig probe;
    ApplyOverride(probe, key, value);
    spec.overrides[key] = value;
  }
}

AgentConfig BuildAgentConfig(const ExperimentSpec& spec, std::uint64_t seed) {
  AgentConfig cfg = AgentConfig::ForMode(spec.mode);
  for (const auto& [key, value] : spec.overrides.items()) {
    ApplyOverride(cfg, key, value);
  }
  cfg.seed = seed;
  cfg.ensemble.gamma = cfg.gamma;
  cfg.td3.gamma = cfg.gamma;
  return cfg;
}

WorldSchedule BuildSchedule(const EnvSpec& env, std::int64_t lifetime,
                            std::uint64_t seed) {
  const int count =
      static_cast<int>(std::max<std::int64_t>(1, (lifetime + env.period - 1) / env.period));
  const std::uint64_t key = DeriveKey({env.schedule_seed, seed});
  if (env.kind == EnvKind::kMaze) {
    MazeParams params;
    params.reward_mode = env.reward;
    return ScheduleMazeWorlds(env.schedule, env.period, count, key, params);
  }
  return ScheduleSinkChain(env.schedule, env.period, count, key);
}

StateVec InitialStateFor(const World& world) {
  if (const auto* maze = dynamic_cast<const MazeWorld*>(&world)) {
    return maze->InitialState();
  }
  return StateVec{};
}

LifelongEnv MakeEnvironment(const EnvSpec& env, std::int64_t lifetime,
                            std::uint64_t seed) {
  WorldSchedule schedule = BuildSchedule(env, lifetime, seed);
  const StateVec start = InitialStateFor(*schedule.entries.front().world);
  return LifelongEnv(std::move(schedule), start);
}

bool RunSummary::ok() const {
  return std::all_of(seeds.begin(), seeds.end(),
                     [](const SeedSummary& s) { return s.error.empty(); });
}

SeedSummary SummarizeSeed(std::uint64_t seed, const LifetimeLog& log) {
  SeedSummary s;
  s.seed = seed;
  s.error = log.error;
  s.steps = static_cast<std::int64_t>(log.steps.size());
  if (log.steps.empty()) {
    if (s.error.empty()) s.error = "empty log";
    return s;
  }
  s.average_reward = AverageLifetimeReward(log);
  s.planning_fraction = PlanningFraction(log);
  for (const WorldSegment& seg : WorldSegments(log)) {
    double sum = 0.0;
    for (std::size_t i = seg.begin; i < seg.end; ++i) sum += log.steps[i].reward;
    s.world_rewards.push_back(sum / static_cast<double>(seg.end - seg.begin));
  }
  return s;
}

RunSummary Summarize(AgentMode mode, std::vector<SeedSummary> seeds) {
  RunSummary r;
  r.mode = mode;
  r.seeds = std::move(seeds);
  const double n = static_cast<double>(r.seeds.size());
  if (r.seeds.empty()) return r;
  std::vector<double> fractions;
  for (const auto& s : r.seeds) {
    r.mean_reward += s.average_reward / n;
    r.mean_fraction += s.planning_fraction / n;
    fractions.push_back(s.planning_fraction);
  }
  double var = 0.0;
  for (const auto& s : r.seeds) {
    var += (s.average_reward - r.mean_reward) * (s.average_reward - r.mean_reward) / n;
  }
  r.std_reward = std::sqrt(var);
  std::sort(fractions.begin(), fractions.end());
  const std::size_t m = fractions.size();
  r.median_fraction = m % 2 ? fractions[m / 2]
                            : 0.5 * (fractions[m / 2 - 1] + fractions[m / 2]);
  return r;
}

int WorkersFromEnvironment() {
  const char* v = std::getenv("AOP_WORKERS");
  if (v == nullptr || *v == '\0') return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("AOP_WORKERS must be a positive integer, got '") + v + "'");
  }
  return static_cast<int>(n);
}

void WriteLifetimeLog(const std::string& path, const LifetimeLog& log) {
  std::ofstream out = OpenOut(path);
  for (const StepLog& s : log.steps) out << s.ToJson().dump() << '\n';
  if (!log.ok()) out << json{{"error", log.error}}.dump() << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

LifetimeLog LoadLifetimeLog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read log " + path);
  LifetimeLog log;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::kParse,
                  path + ":" + std::to_string(lineno) + ": invalid JSON");
    }
    if (j.contains("error") && !j.contains("t")) {
      log.error = j["error"].get<std::string>();
      continue;
    }
    log.steps.push_back(StepLog::FromJson(j));
  }
  return log;
}

void WriteSummaryCsv(const std::string& path, const RunSummary& summary) {
  std::ofstream out = OpenOut(path);
  const char* mode = AgentModeName(summary.mode);
  out << "mode,seed,average_reward,planning_fraction,steps,error\n";
  for (const auto& s : summary.seeds) {
    std::string err = s.error;
    std::replace(err.begin(), err.end(), ',', ';');
    out << mode << ',' << s.seed << ',' << Fmt(s.average_reward) << ','
        << Fmt(s.planning_fraction) << ',' << s.steps << ',' << err << '\n';
  }
  out << mode << ",mean," << Fmt(summary.mean_reward) << ','
      << Fmt(summary.mean_fraction) << ",,\n";
  out << mode << ",std," << Fmt(summary.std_reward) << ",,,\n";
}

RunResult RunExperiment(const ExperimentSpec& spec, const RunOptions& options) {
  spec.Validate();
  const int n = static_cast<int>(spec.seeds.size());
  std::vector<SeedSummary> seeds(n);
  std::vector<LifetimeLog> logs(options.keep_logs ? n : 0);
  if (options.write_files) {
    fs::create_directories(spec.out_dir);
    std::ofstream echo = OpenOut((fs::path(spec.out_dir) / "spec.json").string());
    echo << spec.ToJson().dump(2) << '\n';
  }
  ParallelFor(n, ResolveWorkers(options), [&](int i) {
    const std::uint64_t seed = spec.seeds[i];
    LifelongEnv env = MakeEnvironment(spec.env, spec.lifetime, seed);
    LifetimeLog log =
        RunLifetime(env, BuildAgentConfig(spec, seed), spec.lifetime);
    seeds[i] = SummarizeSeed(seed, log);
    if (options.write_files) {
      WriteLifetimeLog(
          (fs::path(spec.out_dir) / ("seed_" + std::to_string(seed) + ".jsonl")).string(),
          log);
    }
    if (options.keep_logs) logs[i] = std::move(log);
  });
  RunResult result;
  result.summary = Summarize(spec.mode, std::move(seeds));
  result.logs = std::move(logs);
  if (options.write_files) {
    WriteSummaryCsv((fs::path(spec.out_dir) / "summary.csv").string(), result.summary);
    std::ofstream wr = OpenOut((fs::path(spec.out_dir) / "world_rewards.csv").string());
    wr << "seed,world,average_reward\n";
    for (const auto& s : result.summary.seeds) {
      for (std::size_t w = 0; w < s.world_rewards.size(); ++w) {
        wr << s.seed << ',' << w << ',' << Fmt(s.world_rewards[w]) << '\n';
      }
    }
  }
  return result;
}

std::vector<SweepRow> SweepThresholds(const ExperimentSpec& base,
                                      const std::vector<double>& sigmas,
                                      const std::vector<double>& eps,
                                      const RunOptions& options) {
  if (sigmas.empty() || eps.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep: empty threshold grid");
  }
  for (double v : sigmas) {
    if (!(v > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sweep: sigma values must be positive");
  }
  for (double v : eps) {
    if (!(v > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sweep: eps values must be positive");
  }
  std::vector<SweepRow> rows;
  for (double s : sigmas) {
    for (double e : eps) {
      ExperimentSpec cell = base;
      cell.overrides["horizon.sigma_thres"] = s;
      cell.overrides["horizon.eps_thres"] = e;
      cell.out_dir = (fs::path(base.out_dir) / ("sigma_" + Fmt(s) + "_eps_" + Fmt(e))).string();
      SweepRow row;
      row.sigma_thres = s;
      row.eps_thres = e;
      row.summary = RunExperiment(cell, options).summary;
      rows.push_back(std::move(row));
    }
  }
  if (options.write_files) {
    WriteSweepCsv((fs::path(base.out_dir) / "sweep.csv").string(), rows);
  }
  return rows;
}

void WriteSweepCsv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out = OpenOut(path);
  out << "sigma_thres,eps_thres,average_reward,std_reward,planning_fraction\n";
  for (const auto& r : rows) {
    out << Fmt(r.sigma_thres) << ',' << Fmt(r.eps_thres) << ','
        << Fmt(r.summary.mean_reward) << ',' << Fmt(r.summary.std_reward) << ','
        << Fmt(r.summary.mean_fraction) << '\n';
  }
}

std::vector<ProbeRow> DegradationProbe(const ExperimentSpec& spec,
                                       const ProbeOptions& probe,
                                       const RunOptions& options) {
  spec.Validate();
  if (probe.every <= 0 || probe.horizon <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "probe: every and horizon must be positive");
  }
  {
    const AgentConfig cfg = BuildAgentConfig(spec, spec.seeds.front());
    if (!cfg.uses_bc() && !cfg.uses_td3()) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("probe: mode ") + AgentModeName(spec.mode) +
                      " has no policy prior");
    }
  }
  const int n = static_cast<int>(spec.seeds.size());
  std::vector<std::vector<ProbeRow>> per_seed(n);
  ParallelFor(n, ResolveWorkers(options), [&](int i) {
    const std::uint64_t seed = spec.seeds[i];
    LifelongEnv env = MakeEnvironment(spec.env, spec.lifetime, seed);
    auto observer = [&](const Agent& agent, const LifelongEnv& e, const StepLog& s) {
      if ((s.t + 1) % probe.every != 0 && s.t != 0) return;
      const EnvModel frozen = e.model();
      const StateVec start = frozen->Admit(InitialStateFor(*frozen), false);
      const Trajectory traj =
          PriorRollout(*agent.prior(), *frozen, start, probe.horizon);
      double sum = 0.0;
      for (double r : traj.rewards) sum += r;
      per_seed[i].push_back({seed, s.t, e.world_index(),
                             sum / static_cast<double>(probe.horizon)});
    };
    LifetimeLog log =
        RunLifetime(env, BuildAgentConfig(spec, seed), spec.lifetime, observer);
    if (!log.ok()) throw Error(ErrorCode::kNonFinite, "probe run failed: " + log.error);
  });
  std::vector<ProbeRow> rows;
  for (auto& v : per_seed) rows.insert(rows.end(), v.begin(), v.end());
  if (options.write_files) {
    WriteProbeCsv((fs::path(spec.out_dir) / "probe.csv").string(), rows);
  }
  return rows;
}

void WriteProbeCsv(const std::string& path, const std::vector<ProbeRow>& rows) {
  std::ofstream out = OpenOut(path);
  out << "seed,t,world,score\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.t << ',' << r.world_index << ',' << Fmt(r.score) << '\n';
  }
}

void WriteReport(const std::vector<std::string>& log_paths,
                 const std::string& out_dir, int window) {
  if (log_paths.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "report: no logs given");
  }
  std::string missing;
  for (const auto& p : log_paths) {
    if (!fs::exists(p)) missing += (missing.empty() ? "" : ", ") + p;
  }
  if (!missing.empty()) throw Error(ErrorCode::kIo, "report: missing logs: " + missing);
  if (window <= 0) window = kDefaultReportWindow;

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  std::ofstream curve = OpenOut((dir / "reward_curve.csv").string());
  std::ofstream unc = OpenOut((dir / "uncertainty.csv").string());
  std::ofstream segs = OpenOut((dir / "world_segments.csv").string());
  curve << "log,t,reward,smoothed\n";
  unc << "log,t,world,change,sigma,bellman_error,horizon,iterations,rolled_timesteps\n";
  segs << "log,world,begin,end,average_reward,rolled_first_quarter,"
          "rolled_last_quarter,bellman_first_quarter,bellman_last_quarter\n";
  std::vector<double> since_sum, since_iters;
  std::vector<long> since_count;

  for (std::size_t li = 0; li < log_paths.size(); ++li) {
    const LifetimeLog log = LoadLifetimeLog(log_paths[li]);
    std::vector<double> rewards;
    for (const auto& s : log.steps) rewards.push_back(s.reward);
    const std::vector<double> smooth = MovingAverage(rewards, window);
    for (std::size_t i = 0; i < log.steps.size(); ++i) {
      curve << li << ',' << log.steps[i].t << ',' << Fmt(rewards[i]) << ','
            << Fmt(smooth[i]) << '\n';
    }
    for (const WorldSegment& seg : WorldSegments(log)) {
      const std::size_t n = seg.end - seg.begin;
      const std::size_t q = std::max<std::size_t>(1, n / 4);
      double reward = 0.0, rf = 0.0, rl = 0.0, ef = 0.0, el = 0.0;
      for (std::size_t i = seg.begin; i < seg.end; ++i) {
        const StepLog& s = log.steps[i];
        const std::size_t k = i - seg.begin;
        reward += s.reward;
        unc << li << ',' << s.t << ',' << s.world_index << ',' << (k == 0 && i > 0)
            << ',' << Fmt(s.sigma) << ',' << Fmt(s.bellman_error) << ','
            << s.horizon << ',' << s.iterations << ',' << s.rolled_timesteps << '\n';
        if (since_sum.size() <= k) {
          since_sum.resize(k + 1, 0.0);
          since_iters.resize(k + 1, 0.0);
          since_count.resize(k + 1, 0);
        }
        since_sum[k] += static_cast<double>(s.rolled_timesteps);
        since_iters[k] += s.iterations;
        ++since_count[k];
        if (k < q) {
          rf += static_cast<double>(s.rolled_timesteps);
          ef += s.bellman_error;
        }
        if (k >= n - q) {
          rl += static_cast<double>(s.rolled_timesteps);
          el += s.bellman_error;
        }
      }
      segs << li << ',' << seg.world_index << ',' << seg.begin << ',' << seg.end
           << ',' << Fmt(reward / n) << ',' << Fmt(rf / q) << ',' << Fmt(rl / q)
           << ',' << Fmt(ef / q) << ',' << Fmt(el / q) << '\n';
    }
  }
  std::ofstream since = OpenOut((dir / "planning_since_change.csv").string());
  since << "steps_since_change,mean_rolled_timesteps,mean_iterations,count\n";
  for (std::size_t k = 0; k < since_sum.size(); ++k) {
    since << k << ',' << Fmt(since_sum[k] / since_count[k]) << ','
          << Fmt(since_iters[k] / since_count[k]) << ',' << since_count[k] << '\n';
  }
}

void WriteRegretCsv(const std::string& path, const std::vector<RegretSweepRow>& rows) {
  std::ofstream out = OpenOut(path);
  out << "seed,S,A,H,gamma,R,LR,SR,bound,holds\n";
  for (const auto& r : rows) {
    const RegretReport& rep = r.report;
    out << r.seed << ',' << r.num_states << ',' << r.num_actions << ','
        << rep.horizon << ',' << Fmt(rep.gamma) << ',' << Fmt(rep.regret) << ','
        << Fmt(rep.long_term) << ',' << Fmt(rep.short_term) << ','
        << Fmt(rep.bound) << ',' << (rep.Holds() ? 1 : 0) << '\n';
  }
}

}  // namespace aop
