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

#include "riskrank/common.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace riskrank {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::usage: return "usage";
    case ErrorCode::parse: return "parse";
    case ErrorCode::record: return "record";
    case ErrorCode::range: return "range";
    case ErrorCode::format: return "format";
    case ErrorCode::cache_miss: return "cache-miss";
    case ErrorCode::cache_corrupt: return "cache-corruption";
    case ErrorCode::network: return "network";
    case ErrorCode::merge: return "merge";
    case ErrorCode::stratification: return "stratification";
    case ErrorCode::weighting: return "weighting";
    case ErrorCode::missing_field: return "missing-field";
    case ErrorCode::scoring: return "scoring";
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::metric: return "metric";
    case ErrorCode::input: return "input";
    case ErrorCode::bootstrap: return "bootstrap";
    case ErrorCode::cross_validation: return "cross-validation";
    case ErrorCode::io: return "io";
    case ErrorCode::missing_input: return "missing-input";
    }
    return "unknown";
}

const char* to_string(Band band) {
    switch (band) {
    case Band::low: return "low";
    case Band::medium: return "medium";
    case Band::high: return "high";
    case Band::critical: return "critical";
    }
    return "unknown";
}

std::optional<Band> parse_band(std::string_view text) {
    std::string lower;
    lower.reserve(text.size());
    for (char c : trim(text)) {
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (lower == "low") return Band::low;
    if (lower == "medium") return Band::medium;
    if (lower == "high") return Band::high;
    if (lower == "critical") return Band::critical;
    return std::nullopt;
}

std::optional<Band> band_from_score(double s) {
    if (!(s > 0.0) || s > 10.0) return std::nullopt;
    if (s < 4.0) return Band::low;
    if (s < 7.0) return Band::medium;
    if (s < 9.0) return Band::high;
    return Band::critical;
}

namespace {

bool parse_fixed_int(std::string_view text, int& out) {
    if (text.empty()) return false;
    for (char c : text) {
        if (c < '0' || c > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    text = trim(text);
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_fixed_int(text.substr(0, 4), y) || !parse_fixed_int(text.substr(5, 2), m) ||
        !parse_fixed_int(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{std::chrono::sys_days{ymd}};
}

std::string to_string(const Date& date) {
    std::chrono::year_month_day ymd{date.days};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

bool is_cve_id(std::string_view t) {
    // CVE-YYYY-NNNN with four or more digits in the sequence part.
    if (t.size() < 13 || t.substr(0, 4) != "CVE-" || t[8] != '-') return false;
    for (std::size_t i = 4; i < 8; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    }
    for (std::size_t i = 9; i < t.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    }
    return true;
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string_view trim(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    return text;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace riskrank
