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

namespace riskrank::feeds {

struct KevEntry {
    std::string cve_id;
    Date date_added;
    std::string vendor_project;
    std::string product;
    std::string vulnerability_name;

    friend bool operator==(const KevEntry&, const KevEntry&) = default;
};

struct EpssEntry {
    std::string cve_id;
    double epss = 0.0;
    double percentile = 0.0;

    friend bool operator==(const EpssEntry&, const EpssEntry&) = default;
};

struct EpssSnapshot {
    std::string model_version;
    Date score_date;
    std::vector<EpssEntry> entries;
};

struct CveEntry {
    std::string cve_id;
    Date published;
    std::optional<Band> severity_band;
    std::optional<double> base_score;
    std::vector<std::string> cwe_ids;
    std::string description;

    friend bool operator==(const CveEntry&, const CveEntry&) = default;
};

/// Parses the KEV catalog document (top-level object with a
/// "vulnerabilities" array) or its JSON-lines normalization. Duplicate
/// cve_id values collapse onto the first occurrence with the earliest
/// date_added.
std::vector<KevEntry> parse_kev_catalog(std::string_view bytes);

/// Parses the published EPSS CSV: a "#model_version:...,score_date:..."
/// comment line, the header "cve,epss,percentile", then data rows. Record
/// errors carry the 1-based line number.
EpssSnapshot parse_epss_snapshot(std::string_view bytes);

/// Parses CVE records from normalized JSON-lines, or from an NVD JSON feed
/// (API 2.0 "vulnerabilities" or legacy 1.1 "CVE_Items").
std::vector<CveEntry> parse_cve_records(std::string_view bytes);

// "CWE-79", "cwe-79" and "79" all normalize to "CWE-79"; NVD placeholders
// and anything unrecognized give nullopt.
std::optional<std::string> normalize_cwe(std::string_view text);

std::string to_jsonl(const std::vector<CveEntry>& entries);
std::string to_jsonl(const std::vector<KevEntry>& entries);

}  // namespace riskrank::feeds
