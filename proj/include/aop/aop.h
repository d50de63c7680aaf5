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

/* C interface to the aoplab library.  All functions return an aop_status;
 * on failure aop_last_error() describes the problem (thread-local, valid
 * until the next call on the same thread). */
#ifndef AOP_AOP_H_
#define AOP_AOP_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define AOP_API __declspec(dllexport)
#else
#define AOP_API __attribute__((visibility("default")))
#endif

typedef enum aop_status {
  AOP_OK = 0,
  AOP_ERR_INVALID_ARGUMENT = 1,
  AOP_ERR_DIMENSION_MISMATCH = 2,
  AOP_ERR_NON_FINITE = 3,
  AOP_ERR_OUT_OF_RANGE = 4,
  AOP_ERR_IO = 5,
  AOP_ERR_TOO_LARGE = 6,
  AOP_ERR_PARSE = 7,
  AOP_ERR_INTERNAL = 99
} aop_status;

typedef struct aop_experiment aop_experiment;
typedef struct aop_summary aop_summary;

AOP_API const char* aop_version(void);
AOP_API const char* aop_last_error(void);
AOP_API const char* aop_status_name(aop_status status);

/* Strings returned through char** are owned by the caller. */
AOP_API void aop_string_free(char* s);

/* Experiment specs. */
AOP_API aop_status aop_experiment_new(aop_experiment** out);
AOP_API aop_status aop_experiment_load(const char* path, aop_experiment** out);
AOP_API aop_status aop_experiment_from_json(const char* json,
                                            aop_experiment** out);
AOP_API void aop_experiment_free(aop_experiment* spec);
/* "key=value": mode, lifetime, out, env.* fields or an agent override path. */
AOP_API aop_status aop_experiment_assign(aop_experiment* spec,
                                         const char* assignment);
AOP_API aop_status aop_experiment_set_seeds(aop_experiment* spec,
                                            const uint64_t* seeds, size_t n);
AOP_API aop_status aop_experiment_to_json(const aop_experiment* spec,
                                          char** out_json);
/* Newline-separated list of accepted override keys. */
AOP_API aop_status aop_override_keys(char** out_keys);

/* Runs.  workers <= 0 reads AOP_WORKERS. */
AOP_API aop_status aop_run(const aop_experiment* spec, int workers,
                           aop_summary** out);
AOP_API void aop_summary_free(aop_summary* summary);
AOP_API size_t aop_summary_seed_count(const aop_summary* summary);
AOP_API aop_status aop_summary_stats(const aop_summary* summary,
                                     double* mean_reward, double* std_reward,
                                     double* planning_fraction);
AOP_API aop_status aop_summary_seed(const aop_summary* summary, size_t index,
                                    uint64_t* seed, double* average_reward,
                                    double* planning_fraction);
/* Number of seeds whose run aborted. */
AOP_API size_t aop_summary_failures(const aop_summary* summary);

AOP_API aop_status aop_sweep_thresholds(const aop_experiment* spec,
                                        const double* sigmas, size_t n_sigma,
                                        const double* eps, size_t n_eps,
                                        int workers, size_t* rows_written);
AOP_API aop_status aop_probe(const aop_experiment* spec, int64_t every,
                             int horizon, int workers, size_t* rows_written);
/* window <= 0 selects the default (100 steps). */
AOP_API aop_status aop_report(const char* const* log_paths, size_t n,
                              const char* out_dir, int window);

typedef struct aop_regret_stats {
  int instances;
  int violations;           /* LR above the bound */
  int negative_short_term;  /* SR < 0 */
  double max_decomposition_gap;
} aop_regret_stats;

AOP_API aop_status aop_regret_sweep(int instances, uint64_t seed,
                                    const char* csv_path,
                                    aop_regret_stats* stats);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* AOP_AOP_H_ */
