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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "riskrank/corpus.hpp"

namespace riskrank::scoring {

enum class ScoreMethod {
    sm_ordinal,     // CVSS band weight
    sm_continuous,  // CVSS base score
    epss,           // (a) threat
    cvss_x_cwe,     // (b) severity x exposure
    epss_x_cvss,    // (c) threat x severity
    epss_x_cwe,     // (d) threat x exposure
    kri,            // (e) threat x severity x exposure
};

inline constexpr ScoreMethod all_methods[] = {ScoreMethod::sm_ordinal,  ScoreMethod::sm_continuous,
                                              ScoreMethod::epss,        ScoreMethod::cvss_x_cwe,
                                              ScoreMethod::epss_x_cvss, ScoreMethod::epss_x_cwe,
                                              ScoreMethod::kri};

const char* to_string(ScoreMethod method);
std::optional<ScoreMethod> parse_method(std::string_view text);
bool requires_table(ScoreMethod method);

int cvss_weight(Band band);

enum class SmMode { ordinal, continuous };

double sm_score(const corpus::VulnRecord& record, SmMode mode);

double kri_score(const corpus::VulnRecord& record, const corpus::CwePrevalenceTable& table);

// Table may be null for methods that do not use CWE weights.
double ablation_score(const corpus::VulnRecord& record, const corpus::CwePrevalenceTable* table,
                      ScoreMethod method);

std::vector<double> score_all(std::span<const corpus::VulnRecord> records, const corpus::CwePrevalenceTable* table,
                              ScoreMethod method);

enum class Transform { raw, log1p, percentile_rank, minmax };

inline constexpr Transform all_transforms[] = {Transform::raw, Transform::log1p, Transform::percentile_rank,
                                               Transform::minmax};

const char* to_string(Transform kind);

std::vector<double> transform(std::span<const double> scores, Transform kind);

struct ScoredRanking {
    std::string method;
    std::unordered_map<std::string, double> scores;
    std::vector<std::string> order;  // descending score, ties by ascending cve_id
};

ScoredRanking rank(std::string method, std::span<const std::string> cve_ids, std::span<const double> scores);
ScoredRanking rank(std::string method, const std::unordered_map<std::string, double>& scores);

// CSV "cve_id,method,score,rank" rows in ranking order (rank is 1-based).
std::string to_csv_rows(const ScoredRanking& ranking);

}  // namespace riskrank::scoring
