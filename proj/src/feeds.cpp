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

#include "riskrank/feeds.hpp"

#include <charconv>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace riskrank::feeds {

using nlohmann::json;

namespace {

std::string string_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return {};
    return it->get<std::string>();
}

// Splits into lines, reporting each line's byte offset. Strips a trailing CR.
struct Line {
    std::string_view text;
    std::size_t offset;
    std::size_t number;  // 1-based
};

std::vector<Line> lines_of(std::string_view bytes) {
    std::vector<Line> out;
    std::size_t start = 0, number = 1;
    while (start < bytes.size()) {
        auto end = bytes.find('\n', start);
        if (end == std::string_view::npos) end = bytes.size();
        auto text = bytes.substr(start, end - start);
        if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
        out.push_back({text, start, number});
        start = end + 1;
        ++number;
    }
    return out;
}

std::optional<json> try_parse(std::string_view text) {
    json doc = json::parse(text.begin(), text.end(), nullptr, false);
    if (doc.is_discarded()) return std::nullopt;
    return doc;
}

[[noreturn]] void throw_parse_error(std::string_view text, std::size_t base_offset) {
    try {
        const auto unused = json::parse(text.begin(), text.end());
        (void)unused;
    } catch (const json::parse_error& e) {
        std::size_t offset = base_offset + (e.byte > 0 ? e.byte - 1 : 0);
        throw Error(ErrorCode::parse, "malformed JSON at byte " + std::to_string(offset) + ": " + e.what(),
                    offset);
    }
    throw Error(ErrorCode::parse, "malformed JSON", base_offset);
}

// Whole-document parse, falling back to JSON-lines when the document is not a
// single value but its first line is one. Returns the array of element objects.
std::vector<json> load_elements(std::string_view bytes, const char* array_key, const char* line_key,
                                bool& found_container) {
    found_container = false;
    if (auto doc = try_parse(bytes)) {
        if (!doc->is_object()) throw Error(ErrorCode::format, "top-level JSON value is not an object");
        auto it = doc->find(array_key);
        if (it != doc->end()) {
            if (!it->is_array()) throw Error(ErrorCode::format, std::string("\"") + array_key + "\" is not an array");
            found_container = true;
            return it->get<std::vector<json>>();
        }
        if (doc->contains(line_key)) return {std::move(*doc)};
        return {};
    }
    auto lines = lines_of(bytes);
    std::size_t first = 0;
    while (first < lines.size() && trim(lines[first].text).empty()) ++first;
    if (first == lines.size()) return {};
    auto head = try_parse(lines[first].text);
    if (!head || !head->is_object()) throw_parse_error(bytes, 0);
    std::vector<json> out;
    for (std::size_t i = first; i < lines.size(); ++i) {
        auto text = lines[i].text;
        if (trim(text).empty()) continue;
        auto row = try_parse(text);
        if (!row) throw_parse_error(text, lines[i].offset);
        if (!row->is_object()) {
            throw Error(ErrorCode::record, "line " + std::to_string(lines[i].number) + " is not an object",
                        lines[i].number);
        }
        out.push_back(std::move(*row));
    }
    return out;
}

Date require_date(const std::string& text, const std::string& what, std::size_t index) {
    auto date = parse_date(text);
    if (!date) {
        throw Error(ErrorCode::record, what + " '" + text + "' is not an ISO-8601 date (element " +
                                           std::to_string(index) + ")",
                    index);
    }
    return *date;
}

}  // namespace

std::vector<KevEntry> parse_kev_catalog(std::string_view bytes) {
    bool container = false;
    auto elements = load_elements(bytes, "vulnerabilities", "cveID", container);
    if (!container && elements.empty() && !trim(bytes).empty()) {
        if (auto doc = try_parse(bytes)) {
            throw Error(ErrorCode::format, "KEV document has no \"vulnerabilities\" array");
        }
    }
    std::vector<KevEntry> out;
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const auto& el = elements[i];
        if (!el.is_object()) throw Error(ErrorCode::record, "element " + std::to_string(i) + " is not an object", i);
        auto cve = string_field(el, "cveID");
        auto added = string_field(el, "dateAdded");
        if (cve.empty() || added.empty()) {
            throw Error(ErrorCode::record,
                        "element " + std::to_string(i) + " is missing \"cveID\" or \"dateAdded\"", i);
        }
        if (!is_cve_id(cve)) throw Error(ErrorCode::record, "element " + std::to_string(i) + ": bad CVE id " + cve, i);
        KevEntry entry{cve, require_date(added, "dateAdded", i), string_field(el, "vendorProject"),
                       string_field(el, "product"), string_field(el, "vulnerabilityName")};
        auto [it, fresh] = seen.emplace(cve, out.size());
        if (fresh) {
            out.push_back(std::move(entry));
        } else if (entry.date_added < out[it->second].date_added) {
            out[it->second].date_added = entry.date_added;
        }
    }
    return out;
}

namespace {

bool parse_number(std::string_view text, double& out) {
    text = trim(text);
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

EpssSnapshot parse_epss_snapshot(std::string_view bytes) {
    auto lines = lines_of(bytes);
    std::size_t i = 0;
    while (i < lines.size() && trim(lines[i].text).empty()) ++i;
    if (i == lines.size() || lines[i].text.empty() || lines[i].text.front() != '#') {
        throw Error(ErrorCode::format, "EPSS CSV is missing the leading #model_version comment line");
    }
    EpssSnapshot snap;
    bool have_date = false;
    for (const auto& part : split(lines[i].text.substr(1), ',')) {
        auto colon = part.find(':');
        if (colon == std::string::npos) continue;
        auto key = trim(std::string_view(part).substr(0, colon));
        auto value = trim(std::string_view(part).substr(colon + 1));
        if (key == "model_version") {
            snap.model_version = std::string(value);
        } else if (key == "score_date") {
            auto date = parse_date(value);
            if (!date) throw Error(ErrorCode::format, "EPSS comment line has an invalid score_date");
            snap.score_date = *date;
            have_date = true;
        }
    }
    if (snap.model_version.empty() || !have_date) {
        throw Error(ErrorCode::format, "EPSS comment line lacks model_version or score_date");
    }
    ++i;
    while (i < lines.size() && trim(lines[i].text).empty()) ++i;
    if (i == lines.size()) return snap;
    auto header = split(trim(lines[i].text), ',');
    if (header.size() < 3 || trim(header[0]) != "cve" || trim(header[1]) != "epss" || trim(header[2]) != "percentile") {
        throw Error(ErrorCode::format, "EPSS header row must be cve,epss,percentile");
    }
    std::unordered_set<std::string> seen;
    for (++i; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (trim(line.text).empty()) continue;
        const auto where = "line " + std::to_string(line.number);
        auto fields = split(line.text, ',');
        if (fields.size() < 3) throw Error(ErrorCode::record, where + ": expected 3 fields", line.number);
        EpssEntry entry;
        entry.cve_id = std::string(trim(fields[0]));
        if (!is_cve_id(entry.cve_id)) throw Error(ErrorCode::record, where + ": bad CVE id", line.number);
        if (!parse_number(fields[1], entry.epss) || !parse_number(fields[2], entry.percentile)) {
            throw Error(ErrorCode::record, where + ": non-numeric score", line.number);
        }
        if (!(entry.epss >= 0.0 && entry.epss <= 1.0)) {
            throw Error(ErrorCode::range, where + ": epss outside [0,1]", line.number);
        }
        if (!(entry.percentile >= 0.0 && entry.percentile <= 1.0)) {
            throw Error(ErrorCode::range, where + ": percentile outside [0,1]", line.number);
        }
        if (!seen.insert(entry.cve_id).second) {
            throw Error(ErrorCode::record, where + ": duplicate " + entry.cve_id, line.number);
        }
        snap.entries.push_back(std::move(entry));
    }
    return snap;
}

std::optional<std::string> normalize_cwe(std::string_view text) {
    text = trim(text);
    if (text.size() > 4 && (text.substr(0, 4) == "CWE-" || text.substr(0, 4) == "cwe-")) text.remove_prefix(4);
    if (text.empty() || text.size() > 9) return std::nullopt;
    for (char c : text) {
        if (c < '0' || c > '9') return std::nullopt;
    }
    while (text.size() > 1 && text.front() == '0') text.remove_prefix(1);
    return "CWE-" + std::string(text);
}

namespace {

void add_cwe(std::vector<std::string>& out, std::string_view raw) {
    auto cwe = normalize_cwe(raw);
    if (!cwe) return;
    for (const auto& existing : out) {
        if (existing == *cwe) return;
    }
    out.push_back(std::move(*cwe));
}

std::optional<double> number_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) return std::nullopt;
    return it->get<double>();
}

void check_score(const CveEntry& e, std::size_t index) {
    if (e.base_score && !(*e.base_score >= 0.0 && *e.base_score <= 10.0)) {
        throw Error(ErrorCode::range, e.cve_id + ": base_score outside [0,10]", index);
    }
}

CveEntry from_normalized(const json& el, std::size_t index) {
    CveEntry e;
    e.cve_id = string_field(el, "cve_id");
    if (e.cve_id.empty()) throw Error(ErrorCode::record, "record " + std::to_string(index) + " has no cve_id", index);
    if (!is_cve_id(e.cve_id)) throw Error(ErrorCode::record, "record " + std::to_string(index) + ": bad CVE id", index);
    e.published = require_date(string_field(el, "published"), "published", index);
    if (auto it = el.find("severity_band"); it != el.end() && !it->is_null()) {
        auto band = it->is_string() ? parse_band(it->get<std::string>()) : std::nullopt;
        if (!band) throw Error(ErrorCode::record, e.cve_id + ": unknown severity_band", index);
        e.severity_band = band;
    }
    if (auto it = el.find("base_score"); it != el.end() && !it->is_null()) {
        if (!it->is_number()) throw Error(ErrorCode::record, e.cve_id + ": base_score is not a number", index);
        e.base_score = it->get<double>();
    }
    if (auto it = el.find("cwe_ids"); it != el.end() && it->is_array()) {
        for (const auto& c : *it) {
            if (c.is_string()) add_cwe(e.cwe_ids, c.get<std::string>());
        }
    }
    e.description = string_field(el, "description");
    check_score(e, index);
    return e;
}

// Picks the "Primary" metric entry when present, else the first.
const json* pick_metric(const json& metrics, const char* key) {
    auto it = metrics.find(key);
    if (it == metrics.end() || !it->is_array() || it->empty()) return nullptr;
    for (const auto& m : *it) {
        if (string_field(m, "type") == "Primary") return &m;
    }
    return &it->front();
}

CveEntry from_nvd2(const json& item, std::size_t index) {
    const json& cve = item.contains("cve") ? item.at("cve") : item;
    CveEntry e;
    e.cve_id = string_field(cve, "id");
    if (e.cve_id.empty()) throw Error(ErrorCode::record, "record " + std::to_string(index) + " has no cve_id", index);
    if (!is_cve_id(e.cve_id)) throw Error(ErrorCode::record, "record " + std::to_string(index) + ": bad CVE id", index);
    e.published = require_date(string_field(cve, "published"), "published", index);
    if (auto it = cve.find("descriptions"); it != cve.end() && it->is_array()) {
        for (const auto& d : *it) {
            if (string_field(d, "lang") == "en") {
                e.description = string_field(d, "value");
                break;
            }
        }
    }
    if (auto it = cve.find("metrics"); it != cve.end() && it->is_object()) {
        const json* v3 = pick_metric(*it, "cvssMetricV31");
        if (!v3) v3 = pick_metric(*it, "cvssMetricV30");
        if (v3 && v3->contains("cvssData")) {
            const auto& data = v3->at("cvssData");
            e.base_score = number_field(data, "baseScore");
            e.severity_band = parse_band(string_field(data, "baseSeverity"));
        } else if (const json* v2 = pick_metric(*it, "cvssMetricV2")) {
            if (v2->contains("cvssData")) e.base_score = number_field(v2->at("cvssData"), "baseScore");
            e.severity_band = parse_band(string_field(*v2, "baseSeverity"));
        }
    }
    if (auto it = cve.find("weaknesses"); it != cve.end() && it->is_array()) {
        for (const auto& w : *it) {
            if (auto d = w.find("description"); d != w.end() && d->is_array()) {
                for (const auto& v : *d) add_cwe(e.cwe_ids, string_field(v, "value"));
            }
        }
    }
    check_score(e, index);
    return e;
}

CveEntry from_nvd11(const json& item, std::size_t index) {
    CveEntry e;
    const json empty = json::object();
    const json& cve = item.contains("cve") ? item.at("cve") : empty;
    if (auto meta = cve.find("CVE_data_meta"); meta != cve.end()) e.cve_id = string_field(*meta, "ID");
    if (e.cve_id.empty()) throw Error(ErrorCode::record, "record " + std::to_string(index) + " has no cve_id", index);
    if (!is_cve_id(e.cve_id)) throw Error(ErrorCode::record, "record " + std::to_string(index) + ": bad CVE id", index);
    e.published = require_date(string_field(item, "publishedDate"), "publishedDate", index);
    if (auto d = cve.find("description"); d != cve.end() && d->contains("description_data")) {
        const auto& data = d->at("description_data");
        if (data.is_array() && !data.empty()) e.description = string_field(data.front(), "value");
    }
    if (auto impact = item.find("impact"); impact != item.end() && impact->is_object()) {
        if (auto v3 = impact->find("baseMetricV3"); v3 != impact->end() && v3->contains("cvssV3")) {
            const auto& data = v3->at("cvssV3");
            e.base_score = number_field(data, "baseScore");
            e.severity_band = parse_band(string_field(data, "baseSeverity"));
        } else if (auto v2 = impact->find("baseMetricV2"); v2 != impact->end()) {
            if (v2->contains("cvssV2")) e.base_score = number_field(v2->at("cvssV2"), "baseScore");
            e.severity_band = parse_band(string_field(*v2, "severity"));
        }
    }
    if (auto pt = cve.find("problemtype"); pt != cve.end() && pt->contains("problemtype_data")) {
        for (const auto& p : pt->at("problemtype_data")) {
            if (auto d = p.find("description"); d != p.end() && d->is_array()) {
                for (const auto& v : *d) add_cwe(e.cwe_ids, string_field(v, "value"));
            }
        }
    }
    check_score(e, index);
    return e;
}

}  // namespace

std::vector<CveEntry> parse_cve_records(std::string_view bytes) {
    std::vector<CveEntry> out;
    if (trim(bytes).empty()) return out;
    if (auto doc = try_parse(bytes)) {
        if (!doc->is_object()) throw Error(ErrorCode::format, "unrecognized CVE container: top level is not an object");
        if (auto it = doc->find("vulnerabilities"); it != doc->end() && it->is_array()) {
            for (std::size_t i = 0; i < it->size(); ++i) out.push_back(from_nvd2((*it)[i], i));
            return out;
        }
        if (auto it = doc->find("CVE_Items"); it != doc->end() && it->is_array()) {
            for (std::size_t i = 0; i < it->size(); ++i) out.push_back(from_nvd11((*it)[i], i));
            return out;
        }
        if (!doc->contains("cve_id")) {
            throw Error(ErrorCode::format, "unrecognized CVE container: no vulnerabilities/CVE_Items/cve_id key");
        }
        out.push_back(from_normalized(*doc, 0));
        return out;
    }
    bool container = false;
    auto rows = load_elements(bytes, "", "cve_id", container);
    for (std::size_t i = 0; i < rows.size(); ++i) out.push_back(from_normalized(rows[i], i));
    return out;
}

std::string to_jsonl(const std::vector<CveEntry>& entries) {
    std::string out;
    for (const auto& e : entries) {
        nlohmann::ordered_json row;
        row["cve_id"] = e.cve_id;
        row["published"] = to_string(e.published);
        row["severity_band"] = e.severity_band ? nlohmann::ordered_json(to_string(*e.severity_band)) : nullptr;
        row["base_score"] = e.base_score ? nlohmann::ordered_json(*e.base_score) : nullptr;
        row["cwe_ids"] = e.cwe_ids;
        row["description"] = e.description;
        out += row.dump();
        out += '\n';
    }
    return out;
}

std::string to_jsonl(const std::vector<KevEntry>& entries) {
    std::string out;
    for (const auto& e : entries) {
        nlohmann::ordered_json row;
        row["cveID"] = e.cve_id;
        row["dateAdded"] = to_string(e.date_added);
        row["vendorProject"] = e.vendor_project;
        row["product"] = e.product;
        row["vulnerabilityName"] = e.vulnerability_name;
        out += row.dump();
        out += '\n';
    }
    return out;
}

}  // namespace riskrank::feeds
