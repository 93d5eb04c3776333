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

#include "riskrank/riskrank.h"

#include <cmath>
#include <exception>
#include <span>
#include <string>
#include <vector>

#include "riskrank/metrics.hpp"
#include "riskrank/pipeline.hpp"
#include "riskrank/scoring.hpp"

struct rr_config {
    riskrank::pipeline::RunConfig config;
    std::string scratch;
};

struct rr_result {
    std::string summary;
    std::vector<std::string> warnings;
};

namespace {

using riskrank::Error;
using riskrank::ErrorCode;

thread_local std::string last_error;
thread_local std::string last_kind;

void clear_error() {
    last_error.clear();
    last_kind.clear();
}

rr_status fail(rr_status status, const char* kind, std::string message) {
    last_kind = kind;
    last_error = std::move(message);
    return status;
}

rr_status status_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::usage:
    case ErrorCode::input:
    case ErrorCode::configuration: return RR_USAGE;
    case ErrorCode::missing_input: return RR_MISSING_INPUT;
    default: return RR_ERROR;
    }
}

// Runs f with exceptions translated into a status and the thread's error slot.
template <typename F>
rr_status guarded(F&& f, rr_status (*map)(const Error&) = status_for) {
    clear_error();
    try {
        return f();
    } catch (const Error& e) {
        return fail(map(e), riskrank::to_string(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(RR_ERROR, "memory", "out of memory");
    } catch (const std::exception& e) {
        return fail(RR_ERROR, "internal", e.what());
    }
}

rr_status null_arg(const char* name) { return fail(RR_USAGE, "usage", std::string(name) + " is NULL"); }

std::span<const riskrank::Label> label_span(const unsigned char* labels, size_t n) {
    return {reinterpret_cast<const riskrank::Label*>(labels), n};
}

}  // namespace

extern "C" {

const char* rr_version(void) { return riskrank::pipeline::tool_version; }

const char* rr_last_error(void) { return last_error.c_str(); }

const char* rr_last_error_kind(void) { return last_kind.c_str(); }

rr_config* rr_config_new(void) {
    try {
        return new rr_config();
    } catch (...) {
        return nullptr;
    }
}

void rr_config_free(rr_config* config) { delete config; }

rr_status rr_config_load_file(rr_config* config, const char* path) {
    if (!config) return null_arg("config");
    if (!path) return null_arg("path");
    return guarded([&] {
        config->config.load_file(path);
        return RR_OK;
    });
}

rr_status rr_config_set(rr_config* config, const char* key, const char* value) {
    if (!config) return null_arg("config");
    if (!key || !value) return null_arg(!key ? "key" : "value");
    return guarded([&] {
        config->config.set(key, value);
        return RR_OK;
    });
}

rr_status rr_config_get(rr_config* config, const char* key, const char** value) {
    if (!config) return null_arg("config");
    if (!key || !value) return null_arg(!key ? "key" : "value");
    return guarded([&] {
        config->scratch = config->config.get(key);
        *value = config->scratch.c_str();
        return RR_OK;
    });
}

rr_status rr_config_apply_env(rr_config* config) {
    if (!config) return null_arg("config");
    return guarded([&] {
        config->config.apply_env();
        return RR_OK;
    });
}

size_t rr_config_key_count(void) { return riskrank::pipeline::RunConfig::keys().size(); }

const char* rr_config_key(size_t index) {
    const auto& keys = riskrank::pipeline::RunConfig::keys();
    return index < keys.size() ? keys[index].c_str() : nullptr;
}

rr_status rr_run(const rr_config* config, const char* command, rr_result** result) {
    if (result) *result = nullptr;
    if (!config) return null_arg("config");
    if (!command) return null_arg("command");
    clear_error();
    const auto cmd = riskrank::pipeline::parse_command(command);
    if (!cmd) return fail(RR_USAGE, "usage", std::string("unknown command: ") + command);
    try {
        auto out = riskrank::pipeline::run(*cmd, config->config);
        if (result) *result = new rr_result{std::move(out.summary), std::move(out.warnings)};
        return RR_OK;
    } catch (const Error& e) {
        return fail(static_cast<rr_status>(riskrank::pipeline::exit_code_for(*cmd, e)), riskrank::to_string(e.code()),
                    e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(RR_ERROR, "io", e.what());
    } catch (const std::exception& e) {
        return fail(RR_ERROR, "internal", e.what());
    }
}

const char* rr_result_summary(const rr_result* result) { return result ? result->summary.c_str() : ""; }

size_t rr_result_warning_count(const rr_result* result) { return result ? result->warnings.size() : 0; }

const char* rr_result_warning(const rr_result* result, size_t index) {
    if (!result || index >= result->warnings.size()) return nullptr;
    return result->warnings[index].c_str();
}

void rr_result_free(rr_result* result) { delete result; }

rr_status rr_roc_auc(const double* scores, const unsigned char* labels, size_t n, double* out) {
    if (!out || (n && (!scores || !labels))) return null_arg("argument");
    return guarded([&] {
        *out = riskrank::eval::roc_auc({scores, n}, label_span(labels, n));
        return RR_OK;
    });
}

rr_status rr_average_precision(const double* scores, const unsigned char* labels, size_t n, double* out) {
    if (!out || (n && (!scores || !labels))) return null_arg("argument");
    return guarded([&] {
        *out = riskrank::eval::average_precision({scores, n}, label_span(labels, n));
        return RR_OK;
    });
}

rr_status rr_brier(const double* probs, const unsigned char* labels, size_t n, double* out) {
    if (!out || (n && (!probs || !labels))) return null_arg("argument");
    return guarded([&] {
        *out = riskrank::eval::brier({probs, n}, label_span(labels, n));
        return RR_OK;
    });
}

rr_status rr_cvss_weight(const char* band, int* out) {
    if (!band || !out) return null_arg(!band ? "band" : "out");
    clear_error();
    const auto b = riskrank::parse_band(band);
    if (!b) return fail(RR_USAGE, "usage", std::string("unknown severity band: ") + band);
    *out = riskrank::scoring::cvss_weight(*b);
    return RR_OK;
}

rr_status rr_kri_score(double epss, const char* band, double cwe_weight, double* out) {
    if (!band || !out) return null_arg(!band ? "band" : "out");
    clear_error();
    const auto b = riskrank::parse_band(band);
    if (!b) return fail(RR_USAGE, "usage", std::string("unknown severity band: ") + band);
    if (!(epss >= 0.0 && epss <= 1.0)) return fail(RR_USAGE, "range", "epss must lie in [0, 1]");
    if (!(cwe_weight >= 1.0 && cwe_weight <= 2.0)) return fail(RR_USAGE, "range", "cwe_weight must lie in [1, 2]");
    // One synthetic CWE carries the requested weight through the table lookup.
    riskrank::corpus::VulnRecord record;
    record.epss = epss;
    record.severity_band = *b;
    record.cwe_ids = {"CWE-1"};
    riskrank::corpus::CwePrevalenceTable table;
    table.weights["CWE-1"] = cwe_weight;
    return guarded([&] {
        *out = riskrank::scoring::kri_score(record, table);
        return RR_OK;
    });
}

}  // extern "C"
