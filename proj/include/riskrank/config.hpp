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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskrank/scoring.hpp"

namespace riskrank::pipeline {

struct RunConfig {
    std::string kev_url = "https://www.cisa.gov/sites/default/files/feeds/known_exploited_vulnerabilities.json";
    std::string epss_url = "https://epss.empiricalsecurity.com/epss_scores-current.csv.gz";
    std::string cve_source;  // one or more comma-separated paths/URLs
    std::filesystem::path cache_dir = "cache";
    std::filesystem::path output_dir = "out";
    bool offline = false;
    double max_age_hours = 24.0;
    std::uint64_t seed = 42;
    double train_fraction = 0.7;
    std::optional<int> kev_window_days;
    std::vector<scoring::ScoreMethod> methods{std::begin(scoring::all_methods), std::end(scoring::all_methods)};
    std::vector<std::size_t> budgets{100, 250, 500, 1000, 2000};
    std::size_t resamples = 1000;
    std::size_t random_trials = 1000;
    std::size_t recall_k = 500;
    int outer_folds = 5;
    int inner_folds = 3;
    std::vector<double> c_grid{0.1, 1.0, 10.0};
    int max_iter = 2000;
    double tolerance = 1e-8;

    // Sets one documented key from its text form. Throws Error(usage) on an
    // unknown key or unparsable value.
    void set(std::string_view key, std::string_view value);
    std::string get(std::string_view key) const;

    // Flat "key = value" text; '#' starts a comment.
    void load_text(std::string_view text);
    void load_file(const std::filesystem::path& path);
    // RISKRANK_<KEY> overrides, e.g. RISKRANK_SEED=7.
    void apply_env();

    static const std::vector<std::string>& keys();
};

}  // namespace riskrank::pipeline
