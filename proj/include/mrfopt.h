/* Copyright 2026 The mrfopt Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the mrfopt experiment library. Every function returns a
 * status code; on failure mrfopt_last_error() describes the problem for the
 * calling thread. Handles are opaque and owned by the caller. */

#ifndef MRFOPT_H_
#define MRFOPT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(MRFOPT_BUILDING_LIBRARY)
#define MRFOPT_API __attribute__((visibility("default")))
#else
#define MRFOPT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mrfopt_status {
  MRFOPT_OK = 0,
  MRFOPT_E_INVALID_ARGUMENT = 1,
  MRFOPT_E_ENUMERATION_CAP = 2,
  MRFOPT_E_ZERO_PROBABILITY = 3,
  MRFOPT_E_UNKNOWN_IDENTIFIER = 4,
  MRFOPT_E_INFEASIBLE_DEMAND = 5,
  MRFOPT_E_CONDITIONAL_BELOW_P = 6,
  MRFOPT_E_CONFIG = 7,
  MRFOPT_E_IO = 8,
  MRFOPT_E_NUMERIC = 9,
  MRFOPT_E_INTERNAL = 10
} mrfopt_status;

typedef enum mrfopt_format {
  MRFOPT_FORMAT_JSON = 0,
  MRFOPT_FORMAT_CSV = 1
} mrfopt_format;

typedef struct mrfopt_config mrfopt_config;
typedef struct mrfopt_report mrfopt_report;

MRFOPT_API const char* mrfopt_version(void);
/* Message of the last failed call on this thread; empty if none. */
MRFOPT_API const char* mrfopt_last_error(void);
MRFOPT_API const char* mrfopt_status_name(mrfopt_status status);
/* 0 on success, 1 for configuration and I/O errors, 2 otherwise. */
MRFOPT_API int mrfopt_exit_code(mrfopt_status status);

MRFOPT_API mrfopt_status mrfopt_config_from_file(const char* path,
                                                 mrfopt_config** out);
/* `base_dir` resolves a relative instance_file; NULL means ".". */
MRFOPT_API mrfopt_status mrfopt_config_from_json(const char* json_text,
                                                 const char* base_dir,
                                                 mrfopt_config** out);
MRFOPT_API mrfopt_status mrfopt_config_set_seed(mrfopt_config* config,
                                                uint64_t seed);
MRFOPT_API mrfopt_status mrfopt_config_set_trials(mrfopt_config* config,
                                                  uint64_t trials);
MRFOPT_API mrfopt_status mrfopt_config_set_threads(mrfopt_config* config,
                                                   unsigned threads);
/* Kind name such as "min-pipeline"; valid while the config lives. */
MRFOPT_API const char* mrfopt_config_kind(const mrfopt_config* config);
MRFOPT_API void mrfopt_config_free(mrfopt_config* config);

MRFOPT_API mrfopt_status mrfopt_run(const mrfopt_config* config,
                                    mrfopt_report** out);
MRFOPT_API mrfopt_status mrfopt_report_from_file(const char* path,
                                                 mrfopt_report** out);
/* 1 if no trial was infeasible and no checked bound was violated. */
MRFOPT_API int mrfopt_report_passed(const mrfopt_report* report);
MRFOPT_API size_t mrfopt_report_trial_count(const mrfopt_report* report);
/* Numeric aggregate by name; MRFOPT_E_UNKNOWN_IDENTIFIER if absent. */
MRFOPT_API mrfopt_status mrfopt_report_aggregate(const mrfopt_report* report,
                                                 const char* name,
                                                 double* value);
/* MRFOPT_E_NUMERIC if stored aggregates disagree with the trial records. */
MRFOPT_API mrfopt_status mrfopt_report_check(const mrfopt_report* report);
/* Serializes into a malloc'd NUL-terminated buffer; free with
 * mrfopt_string_free. `length` may be NULL. */
MRFOPT_API mrfopt_status mrfopt_report_emit(const mrfopt_report* report,
                                            mrfopt_format format, char** text,
                                            size_t* length);
MRFOPT_API void mrfopt_report_free(mrfopt_report* report);
MRFOPT_API void mrfopt_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* MRFOPT_H_ */
