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
#include <span>
#include <string>
#include <vector>

#include "riskrank/metrics.hpp"

namespace riskrank::eval {

enum class TestKind { delong, paired_bootstrap };

const char* to_string(TestKind kind);

struct ComparisonResult {
    std::string method_a;
    std::string method_b;
    Metric metric = Metric::roc_auc;
    TestKind test = TestKind::delong;
    double value_a = 0.0;
    double value_b = 0.0;
    double delta = 0.0;  // a - b
    double ci_low = 0.0;
    double ci_high = 0.0;
    double p_value = 1.0;
    double p_adjusted = 1.0;
    bool degenerate_variance = false;
};

struct BootstrapOptions {
    std::size_t resamples = 1000;
    std::uint64_t seed = 42;
    bool stratified = true;
};

// Percentile bootstrap interval (2.5%, 97.5%). Resample b draws from its own
// stream derive_seed(seed, b), so results do not depend on thread count.
MetricValue bootstrap_ci(Metric metric, std::span<const double> scores, std::span<const Label> labels,
                         const BootstrapOptions& options = {});

ComparisonResult delong_test(std::span<const double> scores_a, std::span<const double> scores_b,
                             std::span<const Label> labels);

ComparisonResult paired_bootstrap_test(Metric metric, std::span<const double> scores_a,
                                       std::span<const double> scores_b, std::span<const Label> labels,
                                       const BootstrapOptions& options = {});

std::vector<double> holm_adjust(std::span<const double> p_values);

// Linear-interpolated quantile of an ascending-sorted sample.
double sorted_quantile(std::span<const double> sorted, double q);

// Per-record multiplicities for bootstrap resample `index`.
std::vector<double> resample_weights(std::span<const Label> labels, std::uint64_t seed, std::size_t index,
                                     bool stratified);

}  // namespace riskrank::eval
