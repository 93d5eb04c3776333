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
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "riskrank/common.hpp"
#include "riskrank/scoring.hpp"

namespace riskrank::eval {

using LabelMap = std::unordered_map<std::string, bool>;

double precision_at_k(const scoring::ScoredRanking& ranking, const LabelMap& labels, std::size_t k);

// Plain recall among the top k ("KEV recall@k").
double recall_at_k(const scoring::ScoredRanking& ranking, const LabelMap& labels, std::size_t k);

// Per-band recall inside the top k; bands without positives are absent.
std::map<Band, double> recall_at_k_stratified(const scoring::ScoredRanking& ranking, const LabelMap& labels,
                                              const std::unordered_map<std::string, Band>& strata, std::size_t k);

struct ErvSeries {
    std::string method;
    std::vector<double> raw;
    std::vector<double> normalized;
    std::vector<double> lift;
};

struct ErvReport {
    std::vector<std::size_t> budgets;
    double total_value = 0.0;
    std::vector<ErvSeries> methods;  // input rankings, in input order
    ErvSeries oracle;
    std::vector<double> random_expected;  // k * total / n
    std::vector<double> random_mc_mean;
    std::vector<double> random_mc_se;
};

/// Expected remediation value: with value(cve) = label x severity weight,
/// ERV(k) sums value over a ranking's top k. Normalizes against the ranking
/// by value (ties by cve_id) and reports lift over the analytic random
/// expectation, which is cross-checked by `random_trials` seeded draws.
ErvReport erv_simulation(std::span<const scoring::ScoredRanking> rankings, const LabelMap& labels,
                         const std::unordered_map<std::string, int>& severity_weights,
                         std::span<const std::size_t> budgets, std::size_t random_trials, std::uint64_t seed);

scoring::ScoredRanking oracle_ranking(const LabelMap& labels, const std::unordered_map<std::string, int>& severity_weights);

}  // namespace riskrank::eval
