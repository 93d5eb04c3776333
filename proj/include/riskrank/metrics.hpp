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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskrank/common.hpp"

namespace riskrank::eval {

enum class Metric { roc_auc, auprc, brier };

const char* to_string(Metric metric);

struct MetricValue {
    std::string name;
    double value = 0.0;
    std::optional<double> ci_low;
    std::optional<double> ci_high;
    std::size_t n = 0;
};

// Mann-Whitney AUC: fraction of (positive, negative) pairs ordered correctly,
// ties counting one half. Throws Error(metric) when a class is missing.
double roc_auc(std::span<const double> scores, std::span<const Label> labels);

// Non-interpolated step-sum average precision; tied scores form one threshold.
double average_precision(std::span<const double> scores, std::span<const Label> labels);

double brier(std::span<const double> probs, std::span<const Label> labels);

double pearson_r(std::span<const double> x, std::span<const double> y);

// Scores sorted once and grouped into tie blocks, so each metric can be
// re-evaluated in O(n) under per-record multiplicities (bootstrap weights).
// Unweighted evaluation is the all-ones case of the same kernel, which keeps
// resampled and full-sample numbers bit-compatible.
class RankedSample {
public:
    RankedSample(std::span<const double> scores, std::span<const Label> labels);

    std::size_t size() const { return labels_.size(); }
    std::size_t positives() const { return positives_; }

    // weights empty => every record counts once.
    double roc_auc(std::span<const double> weights = {}) const;
    double average_precision(std::span<const double> weights = {}) const;

    // Structural components for the DeLong estimator, in original order:
    // for positives, the fraction of negatives scored below (ties 1/2);
    // for negatives, the fraction of positives scored above (ties 1/2).
    std::vector<double> placements() const;

private:
    struct Block {
        std::size_t begin, end;  // into order_
    };
    template <typename F>
    void for_blocks_ascending(std::span<const double> weights, F&& f) const;

    std::vector<Label> labels_;
    std::vector<std::size_t> order_;  // ascending by score
    std::vector<Block> blocks_;
    std::size_t positives_ = 0;
};

}  // namespace riskrank::eval
