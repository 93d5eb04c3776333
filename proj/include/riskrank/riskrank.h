// Copyright (C) 2026 The riskrank Authors
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

/* Stable C interface to the riskrank library. Every entry point returns an
 * rr_status; on failure rr_last_error() describes the problem for the calling
 * thread. Strings returned by the library stay valid until the owning handle
 * is freed or the same accessor is called again on it. */
#ifndef RISKRANK_RISKRANK_H
#define RISKRANK_RISKRANK_H

#include <stddef.h>

#if defined(RISKRANK_BUILDING)
#define RR_API __attribute__((visibility("default")))
#else
#define RR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status values double as the CLI's process exit codes. */
typedef enum rr_status {
    RR_OK = 0,
    RR_ERROR = 1,          /* any failure without a dedicated code */
    RR_USAGE = 2,          /* bad argument, unknown key or command */
    RR_FETCH = 3,          /* download or cache failure */
    RR_BUILD = 4,          /* feed parse or merge failure */
    RR_TRAIN = 5,          /* stratification, weighting, cross-validation */
    RR_MISSING_INPUT = 6   /* a prerequisite artifact is absent */
} rr_status;

typedef struct rr_config rr_config;
typedef struct rr_result rr_result;

RR_API const char* rr_version(void);

/* Message and category of the last failure on this thread; "" when none. */
RR_API const char* rr_last_error(void);
RR_API const char* rr_last_error_kind(void);

RR_API rr_config* rr_config_new(void);
RR_API void rr_config_free(rr_config* config);
RR_API rr_status rr_config_load_file(rr_config* config, const char* path);
RR_API rr_status rr_config_set(rr_config* config, const char* key, const char* value);
/* *value points into the handle and is replaced by the next get. */
RR_API rr_status rr_config_get(rr_config* config, const char* key, const char** value);
/* Applies RISKRANK_<KEY> environment overrides. */
RR_API rr_status rr_config_apply_env(rr_config* config);
RR_API size_t rr_config_key_count(void);
RR_API const char* rr_config_key(size_t index);

/* Runs one pipeline stage ("fetch", "build", "score", "train", "eval",
 * "decision", "report"). On RR_OK, *result receives a handle to free with
 * rr_result_free; result may be NULL when the caller does not need it. */
RR_API rr_status rr_run(const rr_config* config, const char* command, rr_result** result);
RR_API const char* rr_result_summary(const rr_result* result);
RR_API size_t rr_result_warning_count(const rr_result* result);
RR_API const char* rr_result_warning(const rr_result* result, size_t index);
RR_API void rr_result_free(rr_result* result);

/* Metric kernels over n records; labels are 0 or 1. */
RR_API rr_status rr_roc_auc(const double* scores, const unsigned char* labels, size_t n, double* out);
RR_API rr_status rr_average_precision(const double* scores, const unsigned char* labels, size_t n, double* out);
RR_API rr_status rr_brier(const double* probs, const unsigned char* labels, size_t n, double* out);

/* Severity weight of a CVSS band name: low 1 through critical 4. */
RR_API rr_status rr_cvss_weight(const char* band, int* out);
/* Composite score from its three factors; epss in [0, 1], cwe_weight in [1, 2]. */
RR_API rr_status rr_kri_score(double epss, const char* band, double cwe_weight, double* out);

#ifdef __cplusplus
}
#endif

#endif
