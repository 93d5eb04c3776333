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

// riskrank command-line front end. Links only the C interface.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskrank/riskrank.h"

namespace {

struct ConfigHandle {
    rr_config* ptr = rr_config_new();
    ~ConfigHandle() { rr_config_free(ptr); }
};

int report_failure(rr_status status) {
    std::fprintf(stderr, "riskrank: %s error: %s\n", rr_last_error_kind(), rr_last_error());
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vulnerability prioritization pipeline: feeds, corpus, scoring, learning and evaluation"};
    app.set_version_flag("--version", std::string(rr_version()));
    app.require_subcommand(1, 1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::map<std::string, std::string> flags;
    std::vector<std::string> overrides;
    bool offline = false;
    app.add_option("--config", config_path, "Flat key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", flags["seed"], "Seed for the split, folds, bootstrap and simulation");
    app.add_flag("--offline", offline, "Serve feeds from the local cache only");
    app.add_option("--output-dir", flags["output_dir"], "Directory for datasets, scores and reports");
    app.add_option("--cache-dir", flags["cache_dir"], "Feed cache directory");
    app.add_option("--kev-window", flags["kev_window_days"],
                   "Only count catalog entries added within this many days of publication");
    app.add_option("--set", overrides, "Override any configuration key, as key=value (repeatable)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

    const char* commands[][2] = {
        {"fetch", "Download or refresh the KEV, EPSS and CVE feed snapshots"},
        {"build", "Merge cached feeds into the labeled dataset"},
        {"score", "Split the dataset and score the evaluation partition"},
        {"train", "Nested cross-validation and per-method logistic models"},
        {"eval", "Test-set metrics, confidence intervals and pairwise tests"},
        {"decision", "Budgeted precision, stratified recall and expected remediation value"},
        {"report", "Markdown summary of the evaluation and decision outputs"},
    };
    for (const auto& c : commands) app.add_subcommand(c[0], c[1]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : RR_USAGE;
    }

    ConfigHandle cfg;
    if (!cfg.ptr) {
        std::fprintf(stderr, "riskrank: out of memory\n");
        return RR_ERROR;
    }
    if (!config_path.empty()) {
        if (auto st = rr_config_load_file(cfg.ptr, config_path.c_str())) return report_failure(st);
    }
    for (const auto& [key, value] : flags) {
        if (value.empty()) continue;
        if (auto st = rr_config_set(cfg.ptr, key.c_str(), value.c_str())) return report_failure(st);
    }
    if (offline) {
        if (auto st = rr_config_set(cfg.ptr, "offline", "true")) return report_failure(st);
    }
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "riskrank: usage error: --set expects key=value, got '%s'\n", kv.c_str());
            return RR_USAGE;
        }
        const auto key = kv.substr(0, eq);
        const auto value = kv.substr(eq + 1);
        if (auto st = rr_config_set(cfg.ptr, key.c_str(), value.c_str())) return report_failure(st);
    }
    if (auto st = rr_config_apply_env(cfg.ptr)) return report_failure(st);

    const std::string command = app.get_subcommands().front()->get_name();
    rr_result* result = nullptr;
    if (auto st = rr_run(cfg.ptr, command.c_str(), &result)) return report_failure(st);
    std::fputs(rr_result_summary(result), stdout);
    for (size_t i = 0; i < rr_result_warning_count(result); ++i) {
        std::fprintf(stderr, "riskrank: warning: %s\n", rr_result_warning(result, i));
    }
    rr_result_free(result);
    return RR_OK;
}
