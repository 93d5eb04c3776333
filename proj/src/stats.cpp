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

#include "riskrank/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <thread>

#include "riskrank/rng.hpp"

namespace riskrank::eval {

const char* to_string(TestKind kind) {
    switch (kind) {
    case TestKind::delong: return "delong";
    case TestKind::paired_bootstrap: return "paired_bootstrap";
    }
    return "unknown";
}

namespace {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

double evaluate(Metric metric, const RankedSample& ranked, std::span<const double> scores,
                std::span<const Label> labels, std::span<const double> weights) {
    switch (metric) {
    case Metric::roc_auc: return ranked.roc_auc(weights);
    case Metric::auprc: return ranked.average_precision(weights);
    case Metric::brier: {
        double sum = 0.0, total = 0.0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const double w = weights.empty() ? 1.0 : weights[i];
            if (w == 0.0) continue;
            const double d = scores[i] - (labels[i] ? 1.0 : 0.0);
            sum += w * d * d;
            total += w;
        }
        return sum / total;
    }
    }
    return 0.0;
}

double point_value(Metric metric, std::span<const double> scores, std::span<const Label> labels) {
    if (metric == Metric::brier) return brier(scores, labels);
    RankedSample ranked(scores, labels);
    return metric == Metric::roc_auc ? ranked.roc_auc() : ranked.average_precision();
}

// One entry per resample; nullopt marks a resample on which a metric was undefined.
template <typename F>
std::vector<double> run_resamples(std::span<const Label> labels, const BootstrapOptions& opt, F&& measure) {
    if (opt.resamples == 0) throw Error(ErrorCode::bootstrap, "bootstrap needs at least one resample");
    std::vector<std::optional<double>> values(opt.resamples);
    parallel_for(opt.resamples, [&](std::size_t b) {
        auto w = resample_weights(labels, opt.seed, b, opt.stratified);
        try {
            values[b] = measure(std::span<const double>(w));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::metric) throw;
        }
    });
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) {
        if (v) out.push_back(*v);
    }
    const std::size_t skipped = values.size() - out.size();
    if (skipped * 10 > values.size()) {
        throw Error(ErrorCode::bootstrap, std::to_string(skipped) + " of " + std::to_string(values.size()) +
                                              " resamples were degenerate");
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

double sorted_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error(ErrorCode::input, "quantile of empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

std::vector<double> resample_weights(std::span<const Label> labels, std::uint64_t seed, std::size_t index,
                                     bool stratified) {
    Rng rng(derive_seed(seed, index));
    std::vector<double> w(labels.size(), 0.0);
    if (!stratified) {
        for (std::size_t k = 0; k < labels.size(); ++k) w[rng.below(labels.size())] += 1.0;
        return w;
    }
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
    for (const auto* cls : {&pos, &neg}) {
        for (std::size_t k = 0; k < cls->size(); ++k) w[(*cls)[rng.below(cls->size())]] += 1.0;
    }
    return w;
}

MetricValue bootstrap_ci(Metric metric, std::span<const double> scores, std::span<const Label> labels,
                         const BootstrapOptions& opt) {
    MetricValue out;
    out.name = to_string(metric);
    out.n = scores.size();
    out.value = point_value(metric, scores, labels);
    RankedSample ranked(scores, labels);
    auto values = run_resamples(labels, opt, [&](std::span<const double> w) {
        return evaluate(metric, ranked, scores, labels, w);
    });
    out.ci_low = sorted_quantile(values, 0.025);
    out.ci_high = sorted_quantile(values, 0.975);
    return out;
}

ComparisonResult delong_test(std::span<const double> scores_a, std::span<const double> scores_b,
                             std::span<const Label> labels) {
    if (scores_a.size() != scores_b.size() || scores_a.size() != labels.size()) {
        throw Error(ErrorCode::input, "DeLong test needs paired samples of equal length");
    }
    RankedSample ra(scores_a, labels), rb(scores_b, labels);
    ComparisonResult out;
    out.metric = Metric::roc_auc;
    out.test = TestKind::delong;
    out.value_a = ra.roc_auc();
    out.value_b = rb.roc_auc();
    out.delta = out.value_a - out.value_b;

    const auto va = ra.placements(), vb = rb.placements();
    const double m = static_cast<double>(ra.positives());
    const double n = static_cast<double>(labels.size()) - m;
    if (m < 2 || n < 2) throw Error(ErrorCode::metric, "DeLong test needs at least two records of each class");
    // Variance of the per-record paired difference within each class.
    auto class_variance = [&](Label cls, double count) {
        double mean = 0.0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) mean += va[i] - vb[i];
        }
        mean /= count;
        double ss = 0.0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) {
                const double d = va[i] - vb[i] - mean;
                ss += d * d;
            }
        }
        return ss / (count - 1.0);
    };
    const double var = class_variance(1, m) / m + class_variance(0, n) / n;
    const double se = std::sqrt(std::max(var, 0.0));
    if (!(se > 1e-15)) {
        out.ci_low = out.ci_high = out.delta;
        if (out.delta == 0.0) {
            out.p_value = 1.0;
        } else {
            out.p_value = 0.0;
            out.degenerate_variance = true;
        }
    } else {
        const double z = out.delta / se;
        out.p_value = std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
        out.ci_low = out.delta - 1.96 * se;
        out.ci_high = out.delta + 1.96 * se;
    }
    out.p_adjusted = out.p_value;
    return out;
}

ComparisonResult paired_bootstrap_test(Metric metric, std::span<const double> scores_a,
                                       std::span<const double> scores_b, std::span<const Label> labels,
                                       const BootstrapOptions& opt) {
    if (scores_a.size() != scores_b.size() || scores_a.size() != labels.size()) {
        throw Error(ErrorCode::input, "paired bootstrap needs paired samples of equal length");
    }
    ComparisonResult out;
    out.metric = metric;
    out.test = TestKind::paired_bootstrap;
    out.value_a = point_value(metric, scores_a, labels);
    out.value_b = point_value(metric, scores_b, labels);
    out.delta = out.value_a - out.value_b;
    RankedSample ra(scores_a, labels), rb(scores_b, labels);
    auto deltas = run_resamples(labels, opt, [&](std::span<const double> w) {
        return evaluate(metric, ra, scores_a, labels, w) - evaluate(metric, rb, scores_b, labels, w);
    });
    out.ci_low = sorted_quantile(deltas, 0.025);
    out.ci_high = sorted_quantile(deltas, 0.975);
    const double count = static_cast<double>(deltas.size());
    const double le = static_cast<double>(std::count_if(deltas.begin(), deltas.end(), [](double d) { return d <= 0.0; }));
    const double ge = static_cast<double>(std::count_if(deltas.begin(), deltas.end(), [](double d) { return d >= 0.0; }));
    const double floor = 2.0 / static_cast<double>(opt.resamples);
    out.p_value = std::clamp(2.0 * std::min(le, ge) / count, floor, 1.0);
    out.p_adjusted = out.p_value;
    return out;
}

std::vector<double> holm_adjust(std::span<const double> p) {
    const std::size_t m = p.size();
    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(p[i] >= 0.0 && p[i] <= 1.0)) throw Error(ErrorCode::input, "p-value outside [0,1]", i);
        idx[i] = i;
    }
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return p[a] < p[b]; });
    std::vector<double> out(m);
    double running = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        running = std::max(running, std::min(1.0, static_cast<double>(m - j) * p[idx[j]]));
        out[idx[j]] = running;
    }
    return out;
}

}  // namespace riskrank::eval
