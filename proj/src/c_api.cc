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

#include "aop/aop.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "aop/errors.h"
#include "aop/experiment.h"
#include "aop/regret.h"

struct aop_experiment {
  aop::ExperimentSpec spec;
};

struct aop_summary {
  aop::RunSummary summary;
};

namespace {

thread_local std::string g_last_error;

aop_status Fail(aop_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename F>
aop_status Guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return AOP_OK;
  } catch (const aop::Error& e) {
    return Fail(static_cast<aop_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(AOP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(AOP_ERR_INTERNAL, e.what());
  }
}

char* CopyString(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

aop::RunOptions Options(int workers) {
  aop::RunOptions options;
  options.workers = workers;
  return options;
}

#define AOP_REQUIRE(cond, msg) \
  if (!(cond)) return Fail(AOP_ERR_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* aop_version(void) { return "0.1.0"; }

const char* aop_last_error(void) { return g_last_error.c_str(); }

const char* aop_status_name(aop_status status) {
  switch (status) {
    case AOP_OK: return "ok";
    case AOP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case AOP_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case AOP_ERR_NON_FINITE: return "non-finite value";
    case AOP_ERR_OUT_OF_RANGE: return "out of range";
    case AOP_ERR_IO: return "i/o error";
    case AOP_ERR_TOO_LARGE: return "instance too large";
    case AOP_ERR_PARSE: return "parse error";
    case AOP_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

void aop_string_free(char* s) { delete[] s; }

aop_status aop_experiment_new(aop_experiment** out) {
  AOP_REQUIRE(out != nullptr, "aop_experiment_new: out is null");
  return Guard([&] { *out = new aop_experiment{}; });
}

aop_status aop_experiment_load(const char* path, aop_experiment** out) {
  AOP_REQUIRE(path != nullptr && out != nullptr, "aop_experiment_load: null argument");
  return Guard([&] { *out = new aop_experiment{aop::ExperimentSpec::Load(path)}; });
}

aop_status aop_experiment_from_json(const char* json, aop_experiment** out) {
  AOP_REQUIRE(json != nullptr && out != nullptr,
              "aop_experiment_from_json: null argument");
  return Guard([&] {
    nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
    if (j.is_discarded()) throw aop::Error(aop::ErrorCode::kParse, "spec: invalid JSON");
    *out = new aop_experiment{aop::ExperimentSpec::FromJson(j)};
  });
}

void aop_experiment_free(aop_experiment* spec) { delete spec; }

aop_status aop_experiment_assign(aop_experiment* spec, const char* assignment) {
  AOP_REQUIRE(spec != nullptr && assignment != nullptr,
              "aop_experiment_assign: null argument");
  return Guard([&] {
    aop::ExperimentSpec copy = spec->spec;
    aop::ApplyAssignment(copy, assignment);
    copy.Validate();
    spec->spec = std::move(copy);
  });
}

aop_status aop_experiment_set_seeds(aop_experiment* spec, const uint64_t* seeds,
                                    size_t n) {
  AOP_REQUIRE(spec != nullptr && seeds != nullptr && n > 0,
              "aop_experiment_set_seeds: need at least one seed");
  return Guard([&] { spec->spec.seeds.assign(seeds, seeds + n); });
}

aop_status aop_experiment_to_json(const aop_experiment* spec, char** out_json) {
  AOP_REQUIRE(spec != nullptr && out_json != nullptr,
              "aop_experiment_to_json: null argument");
  return Guard([&] { *out_json = CopyString(spec->spec.ToJson().dump(2)); });
}

aop_status aop_override_keys(char** out_keys) {
  AOP_REQUIRE(out_keys != nullptr, "aop_override_keys: null argument");
  return Guard([&] {
    std::string s;
    for (const auto& k : aop::OverrideKeys()) s += k + "\n";
    *out_keys = CopyString(s);
  });
}

aop_status aop_run(const aop_experiment* spec, int workers, aop_summary** out) {
  AOP_REQUIRE(spec != nullptr && out != nullptr, "aop_run: null argument");
  return Guard([&] {
    *out = new aop_summary{aop::RunExperiment(spec->spec, Options(workers)).summary};
  });
}

void aop_summary_free(aop_summary* summary) { delete summary; }

size_t aop_summary_seed_count(const aop_summary* summary) {
  return summary == nullptr ? 0 : summary->summary.seeds.size();
}

aop_status aop_summary_stats(const aop_summary* summary, double* mean_reward,
                             double* std_reward, double* planning_fraction) {
  AOP_REQUIRE(summary != nullptr, "aop_summary_stats: null summary");
  if (mean_reward) *mean_reward = summary->summary.mean_reward;
  if (std_reward) *std_reward = summary->summary.std_reward;
  if (planning_fraction) *planning_fraction = summary->summary.mean_fraction;
  return AOP_OK;
}

aop_status aop_summary_seed(const aop_summary* summary, size_t index,
                            uint64_t* seed, double* average_reward,
                            double* planning_fraction) {
  AOP_REQUIRE(summary != nullptr, "aop_summary_seed: null summary");
  if (index >= summary->summary.seeds.size()) {
    return Fail(AOP_ERR_OUT_OF_RANGE, "aop_summary_seed: index out of range");
  }
  const auto& s = summary->summary.seeds[index];
  if (seed) *seed = s.seed;
  if (average_reward) *average_reward = s.average_reward;
  if (planning_fraction) *planning_fraction = s.planning_fraction;
  return AOP_OK;
}

size_t aop_summary_failures(const aop_summary* summary) {
  if (summary == nullptr) return 0;
  return static_cast<size_t>(
      std::count_if(summary->summary.seeds.begin(), summary->summary.seeds.end(),
                    [](const aop::SeedSummary& s) { return !s.error.empty(); }));
}

aop_status aop_sweep_thresholds(const aop_experiment* spec, const double* sigmas,
                                size_t n_sigma, const double* eps, size_t n_eps,
                                int workers, size_t* rows_written) {
  AOP_REQUIRE(spec != nullptr && sigmas != nullptr && eps != nullptr,
              "aop_sweep_thresholds: null argument");
  return Guard([&] {
    const auto rows = aop::SweepThresholds(
        spec->spec, std::vector<double>(sigmas, sigmas + n_sigma),
        std::vector<double>(eps, eps + n_eps), Options(workers));
    if (rows_written) *rows_written = rows.size();
  });
}

aop_status aop_probe(const aop_experiment* spec, int64_t every, int horizon,
                     int workers, size_t* rows_written) {
  AOP_REQUIRE(spec != nullptr, "aop_probe: null spec");
  return Guard([&] {
    aop::ProbeOptions probe;
    if (every > 0) probe.every = every;
    if (horizon > 0) probe.horizon = horizon;
    const auto rows = aop::DegradationProbe(spec->spec, probe, Options(workers));
    if (rows_written) *rows_written = rows.size();
  });
}

aop_status aop_report(const char* const* log_paths, size_t n, const char* out_dir,
                      int window) {
  AOP_REQUIRE(log_paths != nullptr && out_dir != nullptr, "aop_report: null argument");
  return Guard([&] {
    std::vector<std::string> paths;
    for (size_t i = 0; i < n; ++i) {
      if (log_paths[i] == nullptr) {
        throw aop::Error(aop::ErrorCode::kInvalidArgument, "aop_report: null log path");
      }
      paths.emplace_back(log_paths[i]);
    }
    aop::WriteReport(paths, out_dir, window);
  });
}

aop_status aop_regret_sweep(int instances, uint64_t seed, const char* csv_path,
                            aop_regret_stats* stats) {
  return Guard([&] {
    aop::RegretSweepConfig cfg;
    cfg.instances = instances;
    cfg.seed = seed;
    const auto rows = aop::RegretSweep(cfg);
    if (csv_path != nullptr) aop::WriteRegretCsv(csv_path, rows);
    if (stats != nullptr) {
      *stats = aop_regret_stats{};
      stats->instances = static_cast<int>(rows.size());
      for (const auto& r : rows) {
        stats->violations += !r.report.Holds();
        stats->negative_short_term += r.report.short_term < 0.0;
        stats->max_decomposition_gap =
            std::max(stats->max_decomposition_gap, r.report.DecompositionGap());
      }
    }
  });
}

}  // extern "C"
