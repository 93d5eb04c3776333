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

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace riskrank {

// Error categories. Values are stable; the C API maps them onto status codes.
enum class ErrorCode {
    usage,
    parse,          // malformed document; position = byte offset
    record,         // bad element; position = element index or line number
    range,          // value outside its domain; position = line/element
    format,         // unrecognized container or missing header
    cache_miss,
    cache_corrupt,
    network,
    merge,
    stratification,
    weighting,
    missing_field,
    scoring,
    configuration,
    metric,
    input,
    bootstrap,
    cross_validation,
    io,
    missing_input,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message,
          std::optional<std::size_t> position = std::nullopt)
        : std::runtime_error(message), code_(code), position_(position) {}

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> position() const noexcept { return position_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> position_;
};

// 0/1 class label. Kept as a byte so label vectors can be viewed as spans.
using Label = std::uint8_t;

enum class Band { low, medium, high, critical };

const char* to_string(Band band);
std::optional<Band> parse_band(std::string_view text);

// CVSS v3 qualitative rating for a base score; nullopt for 0.0 ("none")
// or scores outside [0, 10].
std::optional<Band> band_from_score(double base_score);

// Calendar date, UTC.
struct Date {
    std::chrono::sys_days days{};

    friend auto operator<=>(const Date&, const Date&) = default;
};

// Accepts "YYYY-MM-DD" optionally followed by a time part ("T..." or " ...").
std::optional<Date> parse_date(std::string_view text);
std::string to_string(const Date& date);

bool is_cve_id(std::string_view text);

// Shortest decimal form that round-trips through strtod.
std::string format_double(double value);

std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

}  // namespace riskrank
