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

#include "riskrank/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "riskrank/rng.hpp"

namespace riskrank::corpus {

using nlohmann::json;
using nlohmann::ordered_json;

std::size_t Dataset::positives() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.kev; }));
}

std::vector<Label> Dataset::labels() const {
    std::vector<Label> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.kev ? 1 : 0);
    return out;
}

Dataset merge(const std::vector<feeds::CveEntry>& cves, const feeds::EpssSnapshot& epss,
              const std::vector<feeds::KevEntry>& kev, const MergeOptions& options) {
    {
        std::unordered_set<std::string_view> seen;
        std::vector<std::string> duplicates;
        for (const auto& c : cves) {
            if (!seen.insert(c.cve_id).second) duplicates.push_back(c.cve_id);
        }
        if (!duplicates.empty()) {
            std::sort(duplicates.begin(), duplicates.end());
            duplicates.erase(std::unique(duplicates.begin(), duplicates.end()), duplicates.end());
            std::string list;
            for (const auto& d : duplicates) list += (list.empty() ? "" : ", ") + d;
            throw Error(ErrorCode::merge, "duplicate cve_id in CVE records: " + list);
        }
    }
    std::unordered_map<std::string_view, double> epss_by_id;
    epss_by_id.reserve(epss.entries.size());
    for (const auto& e : epss.entries) epss_by_id.emplace(e.cve_id, e.epss);
    std::unordered_map<std::string_view, Date> kev_by_id;
    for (const auto& k : kev) {
        auto [it, fresh] = kev_by_id.emplace(k.cve_id, k.date_added);
        if (!fresh && k.date_added < it->second) it->second = k.date_added;
    }

    Dataset out;
    auto& prov = out.provenance;
    prov.input_cves = cves.size();
    prov.input_epss = epss.entries.size();
    prov.input_kev = kev.size();
    out.created_at = to_string(epss.score_date);
    for (const auto& c : cves) {
        auto e = epss_by_id.find(c.cve_id);
        if (e == epss_by_id.end()) {
            ++prov.dropped_missing_epss;
            continue;
        }
        std::optional<Band> band = c.severity_band;
        if (!band) {
            if (!c.base_score) {
                ++prov.dropped_missing_severity;
                continue;
            }
            band = band_from_score(*c.base_score);
            if (!band) {
                ++prov.dropped_zero_score;
                continue;
            }
        }
        VulnRecord r{c.cve_id, c.published, *band, c.base_score, c.cwe_ids, e->second, false, std::nullopt};
        if (auto k = kev_by_id.find(c.cve_id); k != kev_by_id.end()) {
            const bool in_window =
                !options.kev_window_days || (k->second.days - c.published.days).count() <= *options.kev_window_days;
            if (in_window) {
                r.kev = true;
                r.kev_date_added = k->second;
                ++prov.positives;
            } else {
                ++prov.kev_outside_window;
            }
        }
        out.records.push_back(std::move(r));
    }
    prov.kept = out.records.size();
    return out;
}

std::vector<std::size_t> stratified_test_indices(std::span<const Label> labels, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw Error(ErrorCode::configuration, "train_fraction must lie in (0,1)");
    }
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty()) {
        throw Error(ErrorCode::stratification, "stratified split needs at least one record of each class");
    }
    std::vector<std::size_t> test;
    std::uint64_t stream = 0;
    for (auto* cls : {&pos, &neg}) {
        Rng rng(derive_seed(spec.seed, stream++));
        rng.shuffle(std::span<std::size_t>(*cls));
        // The epsilon absorbs representation error, e.g. 10 * (1 - 0.7).
        const auto n_test = static_cast<std::size_t>(
            std::floor(static_cast<double>(cls->size()) * (1.0 - spec.train_fraction) + 1e-9));
        test.insert(test.end(), cls->begin(), cls->begin() + static_cast<std::ptrdiff_t>(n_test));
    }
    std::sort(test.begin(), test.end());
    return test;
}

Split stratified_split(const Dataset& dataset, const SplitSpec& spec) {
    const auto labels = dataset.labels();
    const auto test_idx = stratified_test_indices(labels, spec);
    Split out;
    out.train.created_at = out.test.created_at = dataset.created_at;
    std::size_t t = 0;
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        if (t < test_idx.size() && test_idx[t] == i) {
            out.test.records.push_back(dataset.records[i]);
            ++t;
        } else {
            out.train.records.push_back(dataset.records[i]);
        }
    }
    for (auto* part : {&out.train, &out.test}) {
        part->provenance.kept = part->records.size();
        part->provenance.input_cves = part->records.size();
        part->provenance.positives = part->positives();
    }
    return out;
}

double CwePrevalenceTable::weight(const std::string& cwe) const {
    auto it = weights.find(cwe);
    return it == weights.end() ? default_weight : it->second;
}

CwePrevalenceTable compute_cwe_weights(std::span<const VulnRecord> train) {
    if (train.empty()) throw Error(ErrorCode::input, "CWE weights need a nonempty training set");
    std::map<std::string, std::size_t> counts;
    for (const auto& r : train) {
        // cwe_ids are deduplicated at parse time, but records may be built by hand.
        std::vector<std::string_view> distinct(r.cwe_ids.begin(), r.cwe_ids.end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (auto c : distinct) ++counts[std::string(c)];
    }
    CwePrevalenceTable table;
    table.train_size = train.size();
    const double n = static_cast<double>(train.size());
    for (const auto& [cwe, count] : counts) table.weights.emplace(cwe, 1.0 + static_cast<double>(count) / n);
    return table;
}

double cwe_weight_for(const VulnRecord& record, const CwePrevalenceTable& table) {
    double w = 1.0;
    for (const auto& c : record.cwe_ids) w = std::max(w, table.weight(c));
    return w;
}

std::string to_jsonl(std::span<const VulnRecord> records) {
    std::string out;
    for (const auto& r : records) {
        ordered_json row;
        row["cve_id"] = r.cve_id;
        row["published"] = to_string(r.published);
        row["severity_band"] = to_string(r.severity_band);
        row["base_score"] = r.base_score ? ordered_json(*r.base_score) : nullptr;
        row["cwe_ids"] = r.cwe_ids;
        row["epss"] = r.epss;
        row["kev"] = r.kev;
        row["kev_date_added"] = r.kev_date_added ? ordered_json(to_string(*r.kev_date_added)) : nullptr;
        out += row.dump();
        out += '\n';
    }
    return out;
}

std::vector<VulnRecord> records_from_jsonl(std::string_view bytes) {
    std::vector<VulnRecord> out;
    std::size_t start = 0, line_no = 0;
    while (start < bytes.size()) {
        auto end = bytes.find('\n', start);
        if (end == std::string_view::npos) end = bytes.size();
        auto line = trim(bytes.substr(start, end - start));
        ++line_no;
        if (!line.empty()) {
            json row = json::parse(line.begin(), line.end(), nullptr, false);
            if (row.is_discarded() || !row.is_object()) {
                throw Error(ErrorCode::parse, "dataset line " + std::to_string(line_no) + " is not a JSON object", start);
            }
            try {
                VulnRecord r;
                r.cve_id = row.at("cve_id").get<std::string>();
                auto published = parse_date(row.at("published").get<std::string>());
                auto band = parse_band(row.at("severity_band").get<std::string>());
                if (!published || !band) throw Error(ErrorCode::record, "bad date or band", line_no);
                r.published = *published;
                r.severity_band = *band;
                if (!row.at("base_score").is_null()) r.base_score = row.at("base_score").get<double>();
                r.cwe_ids = row.at("cwe_ids").get<std::vector<std::string>>();
                r.epss = row.at("epss").get<double>();
                r.kev = row.at("kev").get<bool>();
                if (!row.at("kev_date_added").is_null()) {
                    r.kev_date_added = parse_date(row.at("kev_date_added").get<std::string>());
                    if (!r.kev_date_added) throw Error(ErrorCode::record, "bad kev_date_added", line_no);
                }
                if (r.kev != r.kev_date_added.has_value()) {
                    throw Error(ErrorCode::record, "kev flag and kev_date_added disagree", line_no);
                }
                out.push_back(std::move(r));
            } catch (const json::exception& e) {
                throw Error(ErrorCode::record, "dataset line " + std::to_string(line_no) + ": " + e.what(), line_no);
            }
        }
        start = end + 1;
    }
    return out;
}

std::string provenance_json(const Dataset& d) {
    const auto& p = d.provenance;
    ordered_json j;
    j["created_at"] = d.created_at;
    j["input_cves"] = p.input_cves;
    j["input_epss"] = p.input_epss;
    j["input_kev"] = p.input_kev;
    j["kept"] = p.kept;
    j["dropped"] = {{"missing_epss", p.dropped_missing_epss},
                    {"missing_severity", p.dropped_missing_severity},
                    {"zero_score", p.dropped_zero_score}};
    j["positives"] = p.positives;
    j["kev_outside_window"] = p.kev_outside_window;
    return j.dump(2) + "\n";
}

void apply_provenance_json(Dataset& d, std::string_view bytes) {
    json j = json::parse(bytes.begin(), bytes.end(), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::parse, "provenance sidecar is not valid JSON");
    auto& p = d.provenance;
    d.created_at = j.value("created_at", std::string{});
    p.input_cves = j.value("input_cves", std::size_t{0});
    p.input_epss = j.value("input_epss", std::size_t{0});
    p.input_kev = j.value("input_kev", std::size_t{0});
    p.kept = j.value("kept", std::size_t{0});
    if (j.contains("dropped")) {
        const auto& dr = j.at("dropped");
        p.dropped_missing_epss = dr.value("missing_epss", std::size_t{0});
        p.dropped_missing_severity = dr.value("missing_severity", std::size_t{0});
        p.dropped_zero_score = dr.value("zero_score", std::size_t{0});
    }
    p.positives = j.value("positives", std::size_t{0});
    p.kev_outside_window = j.value("kev_outside_window", std::size_t{0});
}

std::string to_csv(const CwePrevalenceTable& table, std::uint64_t seed) {
    std::string out = "# train_size=" + std::to_string(table.train_size) + ",seed=" + std::to_string(seed) + "\n";
    out += "cwe_id,weight\n";
    for (const auto& [cwe, w] : table.weights) out += cwe + "," + format_double(w) + "\n";
    return out;
}

CwePrevalenceTable table_from_csv(std::string_view bytes) {
    CwePrevalenceTable table;
    bool header = false;
    for (const auto& raw : split(bytes, '\n')) {
        auto line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto pos = line.find("train_size=");
            if (pos != std::string_view::npos) {
                auto rest = line.substr(pos + 11);
                std::from_chars(rest.data(), rest.data() + rest.size(), table.train_size);
            }
            continue;
        }
        if (!header) {
            if (line != "cwe_id,weight") throw Error(ErrorCode::format, "CWE table header must be cwe_id,weight");
            header = true;
            continue;
        }
        auto fields = split(line, ',');
        double w = 0;
        if (fields.size() != 2 ||
            std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), w).ec != std::errc{}) {
            throw Error(ErrorCode::record, "bad CWE table row: " + std::string(line));
        }
        table.weights.emplace(fields[0], w);
    }
    return table;
}

}  // namespace riskrank::corpus
