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

#include "riskrank/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskrank::scoring {

const char* to_string(ScoreMethod method) {
    switch (method) {
    case ScoreMethod::sm_ordinal: return "sm_ordinal";
    case ScoreMethod::sm_continuous: return "sm_continuous";
    case ScoreMethod::epss: return "epss";
    case ScoreMethod::cvss_x_cwe: return "cvss_x_cwe";
    case ScoreMethod::epss_x_cvss: return "epss_x_cvss";
    case ScoreMethod::epss_x_cwe: return "epss_x_cwe";
    case ScoreMethod::kri: return "kri";
    }
    return "unknown";
}

std::optional<ScoreMethod> parse_method(std::string_view text) {
    for (auto m : all_methods) {
        if (text == to_string(m)) return m;
    }
    return std::nullopt;
}

bool requires_table(ScoreMethod method) {
    return method == ScoreMethod::cvss_x_cwe || method == ScoreMethod::epss_x_cwe || method == ScoreMethod::kri;
}

int cvss_weight(Band band) {
    switch (band) {
    case Band::low: return 1;
    case Band::medium: return 2;
    case Band::high: return 3;
    case Band::critical: return 4;
    }
    return 0;
}

double sm_score(const corpus::VulnRecord& record, SmMode mode) {
    if (mode == SmMode::ordinal) return cvss_weight(record.severity_band);
    if (!record.base_score) {
        throw Error(ErrorCode::missing_field, record.cve_id + " has no base_score for the continuous SM");
    }
    return *record.base_score;
}

double kri_score(const corpus::VulnRecord& r, const corpus::CwePrevalenceTable& table) {
    return r.epss * cvss_weight(r.severity_band) * corpus::cwe_weight_for(r, table);
}

double ablation_score(const corpus::VulnRecord& r, const corpus::CwePrevalenceTable* table, ScoreMethod method) {
    if (requires_table(method) && table == nullptr) {
        throw Error(ErrorCode::configuration, std::string(to_string(method)) + " needs a CWE prevalence table");
    }
    switch (method) {
    case ScoreMethod::sm_ordinal: return sm_score(r, SmMode::ordinal);
    case ScoreMethod::sm_continuous: return sm_score(r, SmMode::continuous);
    case ScoreMethod::epss: return r.epss;
    case ScoreMethod::cvss_x_cwe: return cvss_weight(r.severity_band) * corpus::cwe_weight_for(r, *table);
    case ScoreMethod::epss_x_cvss: return r.epss * cvss_weight(r.severity_band);
    case ScoreMethod::epss_x_cwe: return r.epss * corpus::cwe_weight_for(r, *table);
    case ScoreMethod::kri: return kri_score(r, *table);
    }
    return 0.0;
}

std::vector<double> score_all(std::span<const corpus::VulnRecord> records, const corpus::CwePrevalenceTable* table,
                              ScoreMethod method) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(ablation_score(r, table, method));
    return out;
}

const char* to_string(Transform kind) {
    switch (kind) {
    case Transform::raw: return "raw";
    case Transform::log1p: return "log1p";
    case Transform::percentile_rank: return "percentile_rank";
    case Transform::minmax: return "minmax";
    }
    return "unknown";
}

std::vector<double> transform(std::span<const double> scores, Transform kind) {
    std::vector<double> out(scores.begin(), scores.end());
    const std::size_t n = out.size();
    switch (kind) {
    case Transform::raw:
        break;
    case Transform::log1p:
        for (auto& x : out) x = std::log1p(x);
        break;
    case Transform::percentile_rank: {
        // Mean 1-based rank of each tie block, divided by n.
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
            const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
            for (std::size_t k = i; k <= j; ++k) out[idx[k]] = mid / static_cast<double>(n);
            i = j + 1;
        }
        break;
    }
    case Transform::minmax: {
        if (n == 0) break;
        auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
        const double min = *lo, max = *hi;
        for (std::size_t i = 0; i < n; ++i) out[i] = max > min ? (scores[i] - min) / (max - min) : 0.5;
        break;
    }
    }
    return out;
}

ScoredRanking rank(std::string method, std::span<const std::string> cve_ids, std::span<const double> scores) {
    if (cve_ids.size() != scores.size()) throw Error(ErrorCode::input, "rank: ids and scores differ in length");
    if (cve_ids.empty()) throw Error(ErrorCode::input, "rank: empty score set");
    ScoredRanking out;
    out.method = std::move(method);
    out.scores.reserve(scores.size());
    std::vector<std::size_t> idx(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) throw Error(ErrorCode::scoring, "non-finite score for " + cve_ids[i]);
        if (!out.scores.emplace(cve_ids[i], scores[i]).second) {
            throw Error(ErrorCode::input, "rank: duplicate id " + cve_ids[i]);
        }
        idx[i] = i;
    }
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return cve_ids[a] < cve_ids[b];
    });
    out.order.reserve(idx.size());
    for (auto i : idx) out.order.push_back(cve_ids[i]);
    return out;
}

ScoredRanking rank(std::string method, const std::unordered_map<std::string, double>& scores) {
    std::vector<std::string> ids;
    std::vector<double> values;
    ids.reserve(scores.size());
    values.reserve(scores.size());
    for (const auto& [id, s] : scores) {
        ids.push_back(id);
        values.push_back(s);
    }
    return rank(std::move(method), ids, values);
}

std::string to_csv_rows(const ScoredRanking& ranking) {
    std::string out;
    std::size_t position = 1;
    for (const auto& id : ranking.order) {
        out += id + "," + ranking.method + "," + format_double(ranking.scores.at(id)) + "," + std::to_string(position++) +
               "\n";
    }
    return out;
}

}  // namespace riskrank::scoring
