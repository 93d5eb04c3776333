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

/* Exercises the shared library through its C header only. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "riskrank/riskrank.h"

static int failures = 0;

#define EXPECT(cond)                                                        \
    do {                                                                    \
        if (!(cond)) {                                                      \
            fprintf(stderr, "%s:%d: expected %s (last error: %s)\n", __FILE__, \
                    __LINE__, #cond, rr_last_error());                      \
            ++failures;                                                     \
        }                                                                   \
    } while (0)

static void set_path(rr_config* cfg, const char* key, const char* dir, const char* name) {
    char buf[4096];
    snprintf(buf, sizeof buf, "%s/%s", dir, name);
    EXPECT(rr_config_set(cfg, key, buf) == RR_OK);
}

static void test_metrics(void) {
    const double scores[] = {0.8, 0.35, 0.4, 0.1};
    const unsigned char labels[] = {1, 1, 0, 0};
    const unsigned char one_class[] = {1, 1, 1, 1};
    double out = -1;
    EXPECT(rr_roc_auc(scores, labels, 4, &out) == RR_OK && out == 0.75);
    EXPECT(rr_average_precision(scores, labels, 4, &out) == RR_OK && fabs(out - (1.0 + 2.0 / 3.0) / 2.0) < 1e-12);
    EXPECT(rr_roc_auc(scores, one_class, 4, &out) == RR_ERROR);
    EXPECT(strcmp(rr_last_error_kind(), "metric") == 0);
    EXPECT(strlen(rr_last_error()) > 0);
    EXPECT(rr_roc_auc(NULL, labels, 4, &out) == RR_USAGE);

    const double probs[] = {0.5, 0.5};
    const unsigned char y[] = {1, 0};
    EXPECT(rr_brier(probs, y, 2, &out) == RR_OK && out == 0.25);
    const double bad[] = {1.5, 0.0};
    EXPECT(rr_brier(bad, y, 2, &out) != RR_OK);
}

static void test_scoring(void) {
    int w = 0;
    double kri = 0;
    EXPECT(rr_cvss_weight("critical", &w) == RR_OK && w == 4);
    EXPECT(rr_cvss_weight("low", &w) == RR_OK && w == 1);
    EXPECT(rr_cvss_weight("none", &w) == RR_USAGE);
    EXPECT(rr_kri_score(0.5, "critical", 1.5, &kri) == RR_OK && kri == 3.0);
    EXPECT(rr_kri_score(1.5, "critical", 1.5, &kri) == RR_USAGE);
    EXPECT(strcmp(rr_last_error_kind(), "range") == 0);
    EXPECT(rr_kri_score(0.5, "high", 2.5, &kri) == RR_USAGE);
}

static void test_config(void) {
    rr_config* cfg = rr_config_new();
    const char* value = NULL;
    size_t i;
    EXPECT(cfg != NULL);
    EXPECT(rr_config_get(cfg, "seed", &value) == RR_OK && strcmp(value, "42") == 0);
    EXPECT(rr_config_set(cfg, "seed", "7") == RR_OK);
    EXPECT(rr_config_get(cfg, "seed", &value) == RR_OK && strcmp(value, "7") == 0);
    EXPECT(rr_config_set(cfg, "seed", "seven") == RR_USAGE);
    EXPECT(rr_config_set(cfg, "no_such_key", "1") == RR_USAGE);
    EXPECT(rr_config_get(cfg, "no_such_key", &value) == RR_USAGE);
    EXPECT(rr_config_load_file(cfg, "/nonexistent/riskrank.conf") == RR_USAGE);
    EXPECT(rr_config_key_count() > 10);
    for (i = 0; i < rr_config_key_count(); ++i) {
        EXPECT(rr_config_get(cfg, rr_config_key(i), &value) == RR_OK);
    }
    EXPECT(rr_config_key(rr_config_key_count()) == NULL);
    rr_config_free(cfg);
    rr_config_free(NULL);
}

static void test_pipeline(const char* work) {
    static const char* commands[] = {"fetch", "build", "score", "train", "eval", "decision", "report"};
    rr_config* cfg = rr_config_new();
    rr_result* result = NULL;
    size_t i;
    set_path(cfg, "kev_url", RISKRANK_FIXTURE_DIR, "feeds/kev.json");
    set_path(cfg, "epss_url", RISKRANK_FIXTURE_DIR, "feeds/epss.csv");
    set_path(cfg, "cve_source", RISKRANK_FIXTURE_DIR, "feeds/cves.jsonl");
    set_path(cfg, "cache_dir", work, "cache");
    set_path(cfg, "output_dir", work, "out");
    EXPECT(rr_config_set(cfg, "methods", "epss,kri") == RR_OK);
    EXPECT(rr_config_set(cfg, "resamples", "100") == RR_OK);
    EXPECT(rr_config_set(cfg, "random_trials", "100") == RR_OK);
    EXPECT(rr_config_set(cfg, "budgets", "50,100,1000") == RR_OK);
    EXPECT(rr_config_set(cfg, "recall_k", "100") == RR_OK);

    EXPECT(rr_run(cfg, "deploy", &result) == RR_USAGE);
    EXPECT(rr_run(cfg, NULL, &result) == RR_USAGE && result == NULL);
    EXPECT(rr_run(NULL, "fetch", &result) == RR_USAGE);
    EXPECT(rr_run(cfg, "fetch", NULL) == RR_OK); /* the handle is optional */

    for (i = 0; i < sizeof commands / sizeof commands[0]; ++i) {
        rr_status st = rr_run(cfg, commands[i], &result);
        EXPECT(st == RR_OK);
        if (st != RR_OK) break;
        EXPECT(rr_result_summary(result) != NULL && strlen(rr_result_summary(result)) > 0);
        if (strcmp(commands[i], "decision") == 0) {
            /* Budget 1000 exceeds the 600-record test partition. */
            EXPECT(rr_result_warning_count(result) >= 1);
            EXPECT(rr_result_warning(result, 0) != NULL);
            EXPECT(rr_result_warning(result, 99) == NULL);
        }
        rr_result_free(result);
        result = NULL;
    }

    /* A second output directory has no dataset yet. */
    set_path(cfg, "output_dir", work, "empty");
    EXPECT(rr_run(cfg, "report", &result) == RR_MISSING_INPUT);
    EXPECT(rr_run(cfg, "build", &result) == RR_OK);
    rr_result_free(result);
    rr_config_free(cfg);
}

int main(int argc, char** argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: %s <work-dir>\n", argv[0]);
        return 2;
    }
    EXPECT(strcmp(rr_version(), "1.0.0") == 0);
    test_metrics();
    test_scoring();
    test_config();
    test_pipeline(argv[1]);
    if (failures) {
        fprintf(stderr, "%d check(s) failed\n", failures);
        return 1;
    }
    printf("C API checks passed\n");
    return 0;
}
