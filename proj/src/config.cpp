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

#include "riskrank/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

#include "riskrank/io.hpp"

namespace riskrank::pipeline {

namespace {

template <typename T>
T parse_int(std::string_view key, std::string_view text) {
    text = trim(text);
    T out{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::usage, "config: " + std::string(key) + " expects an integer, got '" + std::string(text) + "'");
    }
    return out;
}

double parse_real(std::string_view key, std::string_view text) {
    text = trim(text);
    double out = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::usage, "config: " + std::string(key) + " expects a number, got '" + std::string(text) + "'");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
    if (text == "0" || text == "false" || text == "no" || text == "off") return false;
    throw Error(ErrorCode::usage, "config: " + std::string(key) + " expects a boolean");
}

std::vector<std::string> list_items(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& part : split(text, ',')) {
        auto item = trim(part);
        if (!item.empty()) out.emplace_back(item);
    }
    return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += ',';
        out += fmt(item);
    }
    return out;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> k{
        "kev_url",     "epss_url",    "cve_source",    "cache_dir",   "output_dir", "offline",  "max_age_hours",
        "seed",        "train_fraction", "kev_window_days", "methods", "budgets",    "resamples", "random_trials",
        "recall_k",    "outer_folds", "inner_folds",   "c_grid",      "max_iter",   "tolerance"};
    return k;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
    const auto value = trim(raw);
    if (key == "kev_url") {
        kev_url = value;
    } else if (key == "epss_url") {
        epss_url = value;
    } else if (key == "cve_source") {
        cve_source = value;
    } else if (key == "cache_dir") {
        cache_dir = std::string(value);
    } else if (key == "output_dir") {
        output_dir = std::string(value);
    } else if (key == "offline") {
        offline = parse_bool(key, value);
    } else if (key == "max_age_hours") {
        max_age_hours = parse_real(key, value);
    } else if (key == "seed") {
        seed = parse_int<std::uint64_t>(key, value);
    } else if (key == "train_fraction") {
        train_fraction = parse_real(key, value);
        if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw Error(ErrorCode::usage, "train_fraction must lie in (0,1)");
    } else if (key == "kev_window_days") {
        if (value.empty() || value == "none") {
            kev_window_days.reset();
        } else {
            kev_window_days = parse_int<int>(key, value);
        }
    } else if (key == "methods") {
        methods.clear();
        for (const auto& item : list_items(value)) {
            auto m = scoring::parse_method(item);
            if (!m) throw Error(ErrorCode::usage, "config: unknown method '" + item + "'");
            methods.push_back(*m);
        }
        if (methods.empty()) throw Error(ErrorCode::usage, "config: methods must not be empty");
    } else if (key == "budgets") {
        budgets.clear();
        for (const auto& item : list_items(value)) {
            auto k = parse_int<std::size_t>(key, item);
            if (k == 0) throw Error(ErrorCode::usage, "config: budgets must be positive");
            budgets.push_back(k);
        }
    } else if (key == "resamples") {
        resamples = parse_int<std::size_t>(key, value);
    } else if (key == "random_trials") {
        random_trials = parse_int<std::size_t>(key, value);
    } else if (key == "recall_k") {
        recall_k = parse_int<std::size_t>(key, value);
    } else if (key == "outer_folds") {
        outer_folds = parse_int<int>(key, value);
    } else if (key == "inner_folds") {
        inner_folds = parse_int<int>(key, value);
    } else if (key == "c_grid") {
        c_grid.clear();
        for (const auto& item : list_items(value)) c_grid.push_back(parse_real(key, item));
        if (c_grid.empty()) throw Error(ErrorCode::usage, "config: c_grid must not be empty");
    } else if (key == "max_iter") {
        max_iter = parse_int<int>(key, value);
    } else if (key == "tolerance") {
        tolerance = parse_real(key, value);
    } else {
        throw Error(ErrorCode::usage, "config: unknown key '" + std::string(key) + "'");
    }
}

std::string RunConfig::get(std::string_view key) const {
    if (key == "kev_url") return kev_url;
    if (key == "epss_url") return epss_url;
    if (key == "cve_source") return cve_source;
    if (key == "cache_dir") return cache_dir.string();
    if (key == "output_dir") return output_dir.string();
    if (key == "offline") return offline ? "true" : "false";
    if (key == "max_age_hours") return format_double(max_age_hours);
    if (key == "seed") return std::to_string(seed);
    if (key == "train_fraction") return format_double(train_fraction);
    if (key == "kev_window_days") return kev_window_days ? std::to_string(*kev_window_days) : "none";
    if (key == "methods") return join(methods, [](auto m) { return std::string(scoring::to_string(m)); });
    if (key == "budgets") return join(budgets, [](auto k) { return std::to_string(k); });
    if (key == "resamples") return std::to_string(resamples);
    if (key == "random_trials") return std::to_string(random_trials);
    if (key == "recall_k") return std::to_string(recall_k);
    if (key == "outer_folds") return std::to_string(outer_folds);
    if (key == "inner_folds") return std::to_string(inner_folds);
    if (key == "c_grid") return join(c_grid, [](auto c) { return format_double(c); });
    if (key == "max_iter") return std::to_string(max_iter);
    if (key == "tolerance") return format_double(tolerance);
    throw Error(ErrorCode::usage, "config: unknown key '" + std::string(key) + "'");
}

void RunConfig::load_text(std::string_view text) {
    std::size_t line_no = 0;
    for (const auto& raw : split(text, '\n')) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::usage, "config line " + std::to_string(line_no) + ": expected key = value", line_no);
        }
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void RunConfig::load_file(const std::filesystem::path& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const Error& e) {
        throw Error(ErrorCode::usage, e.what());
    }
    load_text(text);
}

void RunConfig::apply_env() {
    for (const auto& key : keys()) {
        std::string name = "RISKRANK_";
        for (char c : key) name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        if (const char* v = std::getenv(name.c_str())) set(key, v);
    }
}

}  // namespace riskrank::pipeline
