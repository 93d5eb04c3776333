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

#include "riskrank/decision.hpp"

#include <algorithm>
#include <cmath>

#include "riskrank/rng.hpp"

namespace riskrank::eval {

namespace {

void check_k(const scoring::ScoredRanking& ranking, std::size_t k) {
    if (k < 1 || k > ranking.order.size()) {
        throw Error(ErrorCode::input, "k=" + std::to_string(k) + " outside [1, " +
                                          std::to_string(ranking.order.size()) + "]");
    }
}

bool label_of(const LabelMap& labels, const std::string& id) {
    auto it = labels.find(id);
    if (it == labels.end()) throw Error(ErrorCode::input, "no label for " + id);
    return it->second;
}

}  // namespace

double precision_at_k(const scoring::ScoredRanking& ranking, const LabelMap& labels, std::size_t k) {
    check_k(ranking, k);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) hits += label_of(labels, ranking.order[i]) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(k);
}

double recall_at_k(const scoring::ScoredRanking& ranking, const LabelMap& labels, std::size_t k) {
    check_k(ranking, k);
    std::size_t hits = 0, total = 0;
    for (std::size_t i = 0; i < ranking.order.size(); ++i) {
        if (label_of(labels, ranking.order[i])) {
            ++total;
            if (i < k) ++hits;
        }
    }
    if (total == 0) throw Error(ErrorCode::metric, "recall undefined without positives");
    return static_cast<double>(hits) / static_cast<double>(total);
}

std::map<Band, double> recall_at_k_stratified(const scoring::ScoredRanking& ranking, const LabelMap& labels,
                                              const std::unordered_map<std::string, Band>& strata, std::size_t k) {
    check_k(ranking, k);
    std::map<Band, std::pair<std::size_t, std::size_t>> counts;  // hits, total
    for (std::size_t i = 0; i < ranking.order.size(); ++i) {
        const auto& id = ranking.order[i];
        if (!label_of(labels, id)) continue;
        auto band = strata.find(id);
        if (band == strata.end()) throw Error(ErrorCode::input, "no severity stratum for " + id);
        auto& c = counts[band->second];
        ++c.second;
        if (i < k) ++c.first;
    }
    std::map<Band, double> out;
    for (const auto& [band, c] : counts) out[band] = static_cast<double>(c.first) / static_cast<double>(c.second);
    return out;
}

scoring::ScoredRanking oracle_ranking(const LabelMap& labels,
                                      const std::unordered_map<std::string, int>& severity_weights) {
    std::unordered_map<std::string, double> value;
    value.reserve(labels.size());
    for (const auto& [id, positive] : labels) {
        auto w = severity_weights.find(id);
        if (w == severity_weights.end()) throw Error(ErrorCode::input, "no severity weight for " + id);
        value.emplace(id, positive ? static_cast<double>(w->second) : 0.0);
    }
    return scoring::rank("oracle", value);
}

ErvReport erv_simulation(std::span<const scoring::ScoredRanking> rankings, const LabelMap& labels,
                         const std::unordered_map<std::string, int>& severity_weights,
                         std::span<const std::size_t> budgets, std::size_t random_trials, std::uint64_t seed) {
    const std::size_t n = labels.size();
    ErvReport report;
    report.budgets.assign(budgets.begin(), budgets.end());
    for (auto k : budgets) {
        if (k < 1 || k > n) throw Error(ErrorCode::input, "budget " + std::to_string(k) + " outside [1, n]");
    }
    auto value_of = [&](const std::string& id) {
        return label_of(labels, id) ? static_cast<double>(severity_weights.at(id)) : 0.0;
    };
    for (const auto& [id, positive] : labels) {
        if (positive) report.total_value += static_cast<double>(severity_weights.at(id));
    }
    if (report.total_value == 0.0) throw Error(ErrorCode::metric, "ERV undefined: no value to capture");

    auto captured = [&](const scoring::ScoredRanking& r) {
        if (r.order.size() != n) throw Error(ErrorCode::input, r.method + " ranks a different record set");
        std::vector<double> prefix(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + value_of(r.order[i]);
        std::vector<double> out;
        for (auto k : budgets) out.push_back(prefix[k]);
        return out;
    };

    const auto oracle = oracle_ranking(labels, severity_weights);
    const auto oracle_raw = captured(oracle);
    for (auto k : budgets) report.random_expected.push_back(static_cast<double>(k) * report.total_value / static_cast<double>(n));

    auto series = [&](const scoring::ScoredRanking& r) {
        ErvSeries s;
        s.method = r.method;
        s.raw = captured(r);
        for (std::size_t b = 0; b < budgets.size(); ++b) {
            s.normalized.push_back(s.raw[b] / oracle_raw[b]);
            s.lift.push_back(s.raw[b] / report.random_expected[b]);
        }
        return s;
    };
    for (const auto& r : rankings) report.methods.push_back(series(r));
    report.oracle = series(oracle);

    // Monte Carlo cross-check: uniform random top-k sets via partial Fisher-Yates.
    std::vector<double> values;
    values.reserve(n);
    for (const auto& id : oracle.order) values.push_back(value_of(id));
    const std::size_t kmax = budgets.empty() ? 0 : *std::max_element(budgets.begin(), budgets.end());
    std::vector<double> sum(budgets.size(), 0.0), sum_sq(budgets.size(), 0.0);
    std::vector<double> perm;
    for (std::size_t t = 0; t < random_trials; ++t) {
        Rng rng(derive_seed(seed, t));
        perm = values;
        std::vector<double> prefix(kmax + 1, 0.0);
        for (std::size_t i = 0; i < kmax; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(n - i));
            std::swap(perm[i], perm[j]);
            prefix[i + 1] = prefix[i] + perm[i];
        }
        for (std::size_t b = 0; b < budgets.size(); ++b) {
            sum[b] += prefix[budgets[b]];
            sum_sq[b] += prefix[budgets[b]] * prefix[budgets[b]];
        }
    }
    for (std::size_t b = 0; b < budgets.size(); ++b) {
        if (random_trials == 0) {
            report.random_mc_mean.push_back(0.0);
            report.random_mc_se.push_back(0.0);
            continue;
        }
        const double trials = static_cast<double>(random_trials);
        const double mean = sum[b] / trials;
        const double var = random_trials > 1 ? std::max(0.0, (sum_sq[b] - trials * mean * mean) / (trials - 1.0)) : 0.0;
        report.random_mc_mean.push_back(mean);
        report.random_mc_se.push_back(std::sqrt(var / trials));
    }
    return report;
}

}  // namespace riskrank::eval
