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

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskrank/common.hpp"
#include "riskrank/config.hpp"

namespace riskrank::pipeline {

inline constexpr const char* tool_version = "1.0.0";

/// Files written under RunConfig::output_dir, by command:
///   build     dataset.jsonl, dataset.provenance.json, manifest.json
///   score     split.csv, cwe_weights.csv, scores.csv (test partition)
///   train     model_<method>.json, cv_<method>.csv
///   eval      evaluation.json
///   decision  fig5.csv, fig6.csv, fig6_budgets.csv, fig7.csv, decision.json
///   report    report.md
/// Every command rewrites manifest.json and merges its wall-clock time into
/// timings.json; everything except timings.json is a pure function of the
/// configuration and the cached feed payloads.
enum class Command { fetch, build, score, train, eval, decision, report };

const char* to_string(Command command);
std::optional<Command> parse_command(std::string_view text);

struct CommandResult {
    std::string summary;
    std::vector<std::string> warnings;
};

CommandResult run(Command command, const RunConfig& config);

CommandResult cmd_fetch(const RunConfig& config);
CommandResult cmd_build(const RunConfig& config);
CommandResult cmd_score(const RunConfig& config);
CommandResult cmd_train(const RunConfig& config);
CommandResult cmd_eval(const RunConfig& config);
CommandResult cmd_decision(const RunConfig& config);
CommandResult cmd_report(const RunConfig& config);

// Process exit codes: 0 success, 1 other failure, 2 usage, 3 fetch,
// 4 build/merge, 5 train (stratification, CV), 6 missing prerequisite output.
int exit_code_for(Command command, const Error& error);

}  // namespace riskrank::pipeline
