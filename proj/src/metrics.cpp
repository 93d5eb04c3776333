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

#include "riskrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskrank::eval {

const char* to_string(Metric metric) {
    switch (metric) {
    case Metric::roc_auc: return "roc_auc";
    case Metric::auprc: return "auprc";
    case Metric::brier: return "brier";
    }
    return "unknown";
}

RankedSample::RankedSample(std::span<const double> scores, std::span<const Label> labels)
    : labels_(labels.begin(), labels.end()), order_(scores.size()) {
    if (scores.size() != labels.size()) throw Error(ErrorCode::input, "scores and labels differ in length");
    for (double s : scores) {
        if (std::isnan(s)) throw Error(ErrorCode::input, "NaN score");
    }
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
    for (std::size_t i = 0; i < order_.size();) {
        std::size_t j = i + 1;
        while (j < order_.size() && scores[order_[j]] == scores[order_[i]]) ++j;
        blocks_.push_back({i, j});
        i = j;
    }
    for (auto l : labels_) positives_ += l ? 1 : 0;
}

template <typename F>
void RankedSample::for_blocks_ascending(std::span<const double> weights, F&& f) const {
    for (const auto& b : blocks_) {
        double pw = 0.0, nw = 0.0;
        for (std::size_t k = b.begin; k < b.end; ++k) {
            const auto i = order_[k];
            const double w = weights.empty() ? 1.0 : weights[i];
            (labels_[i] ? pw : nw) += w;
        }
        f(pw, nw);
    }
}

double RankedSample::roc_auc(std::span<const double> weights) const {
    double total = 0.0, neg_below = 0.0, pos = 0.0;
    for_blocks_ascending(weights, [&](double pw, double nw) {
        total += pw * (neg_below + 0.5 * nw);
        neg_below += nw;
        pos += pw;
    });
    if (pos == 0.0 || neg_below == 0.0) throw Error(ErrorCode::metric, "ROC-AUC needs both classes");
    return total / (pos * neg_below);
}

double RankedSample::average_precision(std::span<const double> weights) const {
    struct Counts {
        double pw, nw;
    };
    std::vector<Counts> per_block;
    per_block.reserve(blocks_.size());
    double pos = 0.0;
    for_blocks_ascending(weights, [&](double pw, double nw) {
        per_block.push_back({pw, nw});
        pos += pw;
    });
    if (pos == 0.0) throw Error(ErrorCode::metric, "average precision needs at least one positive");
    double ap = 0.0, tp = 0.0, seen = 0.0;
    for (auto it = per_block.rbegin(); it != per_block.rend(); ++it) {
        tp += it->pw;
        seen += it->pw + it->nw;
        if (it->pw > 0.0) ap += (it->pw / pos) * (tp / seen);
    }
    return ap;
}

std::vector<double> RankedSample::placements() const {
    const double n_pos = static_cast<double>(positives_);
    const double n_neg = static_cast<double>(labels_.size() - positives_);
    std::vector<double> out(labels_.size());
    double neg_below = 0.0, pos_below = 0.0;
    for (const auto& b : blocks_) {
        double pw = 0.0, nw = 0.0;
        for (std::size_t k = b.begin; k < b.end; ++k) (labels_[order_[k]] ? pw : nw) += 1.0;
        const double pos_above = n_pos - pos_below - pw;
        for (std::size_t k = b.begin; k < b.end; ++k) {
            const auto i = order_[k];
            out[i] = labels_[i] ? (neg_below + 0.5 * nw) / n_neg : (pos_above + 0.5 * pw) / n_pos;
        }
        neg_below += nw;
        pos_below += pw;
    }
    return out;
}

double roc_auc(std::span<const double> scores, std::span<const Label> labels) {
    return RankedSample(scores, labels).roc_auc();
}

double average_precision(std::span<const double> scores, std::span<const Label> labels) {
    return RankedSample(scores, labels).average_precision();
}

double brier(std::span<const double> probs, std::span<const Label> labels) {
    if (probs.size() != labels.size()) throw Error(ErrorCode::input, "probs and labels differ in length");
    if (probs.empty()) throw Error(ErrorCode::input, "Brier score of an empty sample");
    double sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) {
            throw Error(ErrorCode::input, "probability outside [0,1] at index " + std::to_string(i), i);
        }
        const double d = probs[i] - (labels[i] ? 1.0 : 0.0);
        sum += d * d;
    }
    return sum / static_cast<double>(probs.size());
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::input, "pearson_r needs equal lengths >= 2");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::metric, "correlation undefined for constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace riskrank::eval
