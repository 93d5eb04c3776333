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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "riskrank/common.hpp"
#include "riskrank/feeds.hpp"

namespace riskrank::corpus {

struct VulnRecord {
    std::string cve_id;
    Date published;
    Band severity_band = Band::low;
    std::optional<double> base_score;
    std::vector<std::string> cwe_ids;
    double epss = 0.0;
    bool kev = false;
    std::optional<Date> kev_date_added;  // present iff kev

    friend bool operator==(const VulnRecord&, const VulnRecord&) = default;
};

struct Provenance {
    std::size_t input_cves = 0;
    std::size_t input_epss = 0;
    std::size_t input_kev = 0;
    std::size_t kept = 0;
    std::size_t dropped_missing_epss = 0;
    std::size_t dropped_missing_severity = 0;  // neither band nor base score
    std::size_t dropped_zero_score = 0;        // band absent and base score 0.0 ("none")
    std::size_t positives = 0;
    std::size_t kev_outside_window = 0;  // catalog members not labeled because of the window

    std::size_t dropped() const { return dropped_missing_epss + dropped_missing_severity + dropped_zero_score; }
    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Dataset {
    std::vector<VulnRecord> records;
    Provenance provenance;
    std::string created_at;  // as-of date of the EPSS snapshot the dataset was built from

    std::size_t positives() const;
    std::vector<Label> labels() const;
};

struct MergeOptions {
    // When set, only catalog entries added within this many days of the CVE's
    // publication count as positives.
    std::optional<int> kev_window_days;
};

Dataset merge(const std::vector<feeds::CveEntry>& cves, const feeds::EpssSnapshot& epss,
              const std::vector<feeds::KevEntry>& kev, const MergeOptions& options = {});

struct SplitSpec {
    double train_fraction = 0.7;
    std::uint64_t seed = 42;
};

struct Split {
    Dataset train;
    Dataset test;
};

/// Splits each class independently: floor(n_c * (1 - train_fraction)) records
/// of class c go to the test side, the rest to train. Records keep their
/// original relative order within each partition.
Split stratified_split(const Dataset& dataset, const SplitSpec& spec = {});

// Indices (into dataset.records) of the test partition, ascending.
std::vector<std::size_t> stratified_test_indices(std::span<const Label> labels, const SplitSpec& spec);

struct CwePrevalenceTable {
    std::map<std::string, double> weights;
    double default_weight = 1.0;
    std::size_t train_size = 0;

    double weight(const std::string& cwe) const;
    friend bool operator==(const CwePrevalenceTable&, const CwePrevalenceTable&) = default;
};

CwePrevalenceTable compute_cwe_weights(std::span<const VulnRecord> train);
inline CwePrevalenceTable compute_cwe_weights(const Dataset& train) { return compute_cwe_weights(train.records); }

// Maximum table weight over the record's CWEs; 1.0 when it has none.
double cwe_weight_for(const VulnRecord& record, const CwePrevalenceTable& table);

// Persistence: JSON-lines of VulnRecord, provenance sidecar JSON, and the
// CWE table as CSV "cwe_id,weight" under a "# train_size=...,seed=..." line.
std::string to_jsonl(std::span<const VulnRecord> records);
std::vector<VulnRecord> records_from_jsonl(std::string_view bytes);
std::string provenance_json(const Dataset& dataset);
void apply_provenance_json(Dataset& dataset, std::string_view bytes);
std::string to_csv(const CwePrevalenceTable& table, std::uint64_t seed);
CwePrevalenceTable table_from_csv(std::string_view bytes);

}  // namespace riskrank::corpus
