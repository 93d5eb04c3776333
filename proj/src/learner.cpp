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

#include "riskrank/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

#include "riskrank/metrics.hpp"
#include "riskrank/rng.hpp"

namespace riskrank::learner {

ClassWeights class_weights(std::span<const Label> labels) {
    std::size_t pos = 0;
    for (auto l : labels) pos += l ? 1 : 0;
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw Error(ErrorCode::weighting, "class weights need both classes present");
    const double n = static_cast<double>(labels.size());
    return {n / (2.0 * static_cast<double>(pos)), n / (2.0 * static_cast<double>(neg))};
}

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

struct Derivatives {
    std::array<double, 2> grad;
    std::array<double, 3> hess;  // h00, h01, h11
};

Derivatives derivatives(const Objective& f, double b0, double b1) {
    Derivatives d{{0.0, 0.0}, {0.0, 0.0, 0.0}};
    for (std::size_t i = 0; i < f.scores.size(); ++i) {
        const double s = f.scores[i];
        const double w = f.labels[i] ? f.weights.w_pos : f.weights.w_neg;
        const double p = sigmoid(b0 + b1 * s);
        const double r = w * (p - (f.labels[i] ? 1.0 : 0.0));
        const double h = w * p * (1.0 - p);
        d.grad[0] += r;
        d.grad[1] += r * s;
        d.hess[0] += h;
        d.hess[1] += h * s;
        d.hess[2] += h * s * s;
    }
    d.grad[1] += b1 / f.c;
    d.hess[2] += 1.0 / f.c;
    return d;
}

}  // namespace

double Objective::value(double b0, double b1) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double z = b0 + b1 * scores[i];
        const double w = labels[i] ? weights.w_pos : weights.w_neg;
        sum += w * (softplus(z) - (labels[i] ? z : 0.0));
    }
    return sum + b1 * b1 / (2.0 * c);
}

std::array<double, 2> Objective::gradient(double b0, double b1) const { return derivatives(*this, b0, b1).grad; }

LogisticModel fit_logistic(std::span<const double> scores, std::span<const Label> labels, const ClassWeights& weights,
                           const FitOptions& opt) {
    if (scores.size() != labels.size()) throw Error(ErrorCode::input, "scores and labels differ in length");
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) throw Error(ErrorCode::input, "non-finite score at index " + std::to_string(i), i);
        (labels[i] ? pos : neg) = true;
    }
    if (!pos || !neg) throw Error(ErrorCode::input, "logistic fit needs both classes");
    if (!(opt.c > 0.0)) throw Error(ErrorCode::configuration, "C must be positive");

    const Objective f{scores, labels, weights, opt.c};
    LogisticModel model;
    model.c = opt.c;
    double b0 = 0.0, b1 = 0.0;
    double fx = f.value(b0, b1);
    for (int it = 0; it < opt.max_iter; ++it) {
        const auto d = derivatives(f, b0, b1);
        if (std::max(std::fabs(d.grad[0]), std::fabs(d.grad[1])) <= opt.tolerance) {
            model.converged = true;
            model.iterations = it;
            break;
        }
        const double det = d.hess[0] * d.hess[2] - d.hess[1] * d.hess[1];
        double s0, s1;
        if (det > 0.0 && std::isfinite(det)) {
            s0 = -(d.hess[2] * d.grad[0] - d.hess[1] * d.grad[1]) / det;
            s1 = -(d.hess[0] * d.grad[1] - d.hess[1] * d.grad[0]) / det;
        } else {
            s0 = -d.grad[0];
            s1 = -d.grad[1];
        }
        const double slope = d.grad[0] * s0 + d.grad[1] * s1;
        if (slope >= 0.0) {
            s0 = -d.grad[0];
            s1 = -d.grad[1];
        }
        // Armijo backtracking. Close to the optimum the objective stops
        // resolving the decrease, so a step that leaves it flat to rounding
        // but shrinks the gradient is accepted as well.
        const double gnorm = std::max(std::fabs(d.grad[0]), std::fabs(d.grad[1]));
        const double flat = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(fx));
        auto acceptable = [&](double step, double fv) {
            if (fv <= fx + 1e-4 * step * (d.grad[0] * s0 + d.grad[1] * s1)) return true;
            if (!(fv <= fx + flat)) return false;
            const auto g = f.gradient(b0 + step * s0, b1 + step * s1);
            return std::max(std::fabs(g[0]), std::fabs(g[1])) < gnorm;
        };
        double t = 1.0;
        double fnew = f.value(b0 + t * s0, b1 + t * s1);
        while (!acceptable(t, fnew) && t > 1e-12) {
            t *= 0.5;
            fnew = f.value(b0 + t * s0, b1 + t * s1);
        }
        const double nb0 = b0 + t * s0, nb1 = b1 + t * s1;
        model.iterations = it + 1;
        if (nb0 == b0 && nb1 == b1) break;  // no representable progress
        b0 = nb0;
        b1 = nb1;
        fx = fnew;
    }
    if (!model.converged) {
        const auto g = f.gradient(b0, b1);
        model.converged = std::max(std::fabs(g[0]), std::fabs(g[1])) <= opt.tolerance;
    }
    model.beta0 = b0;
    model.beta1 = b1;
    return model;
}

double predict_proba(const LogisticModel& model, double score) { return sigmoid(model.beta0 + model.beta1 * score); }

std::vector<double> predict_proba(const LogisticModel& model, std::span<const double> scores) {
    std::vector<double> out;
    out.reserve(scores.size());
    for (double s : scores) out.push_back(predict_proba(model, s));
    return out;
}

std::vector<int> stratified_folds(std::span<const Label> labels, int k, std::uint64_t seed) {
    if (k < 2) throw Error(ErrorCode::configuration, "need at least two folds");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
    if (pos.size() < static_cast<std::size_t>(k) || neg.size() < static_cast<std::size_t>(k)) {
        throw Error(ErrorCode::cross_validation, "too few records per class for " + std::to_string(k) +
                                                      "-fold stratification (" + std::to_string(pos.size()) +
                                                      " positives)");
    }
    std::vector<int> fold(labels.size(), 0);
    std::uint64_t stream = 0;
    for (auto* cls : {&pos, &neg}) {
        Rng rng(derive_seed(seed, stream++));
        rng.shuffle(std::span<std::size_t>(*cls));
        for (std::size_t j = 0; j < cls->size(); ++j) fold[(*cls)[j]] = static_cast<int>(j % static_cast<std::size_t>(k));
    }
    return fold;
}

namespace {

std::vector<Label> labels_of(std::span<const corpus::VulnRecord> records) {
    std::vector<Label> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.kev ? 1 : 0);
    return out;
}

struct FoldData {
    std::vector<double> train_scores, test_scores;
    std::vector<Label> train_labels, test_labels;
};

FoldData make_fold(std::span<const corpus::VulnRecord> records, std::span<const int> fold, int held_out,
                   scoring::ScoreMethod method) {
    std::vector<corpus::VulnRecord> train, test;
    for (std::size_t i = 0; i < records.size(); ++i) (fold[i] == held_out ? test : train).push_back(records[i]);
    FoldData d;
    std::optional<corpus::CwePrevalenceTable> table;
    if (scoring::requires_table(method)) table = corpus::compute_cwe_weights(train);
    const auto* tp = table ? &*table : nullptr;
    d.train_scores = scoring::score_all(train, tp, method);
    d.test_scores = scoring::score_all(test, tp, method);
    d.train_labels = labels_of(train);
    d.test_labels = labels_of(test);
    return d;
}

LogisticModel fit_fold(const FoldData& d, double c, const CvConfig& config) {
    return fit_logistic(d.train_scores, d.train_labels, class_weights(d.train_labels),
                        {c, config.max_iter, config.tolerance});
}

double mean(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

double select_c(std::span<const corpus::VulnRecord> records, scoring::ScoreMethod method, const CvConfig& config,
                int folds, std::uint64_t seed) {
    if (config.c_grid.empty()) throw Error(ErrorCode::configuration, "empty C grid");
    const auto labels = labels_of(records);
    const auto fold = stratified_folds(labels, folds, seed);
    std::vector<FoldData> data;
    for (int f = 0; f < folds; ++f) data.push_back(make_fold(records, fold, f, method));
    double best_c = config.c_grid.front();
    double best_auc = -1.0;
    for (double c : config.c_grid) {
        std::vector<double> aucs;
        for (const auto& d : data) {
            const auto model = fit_fold(d, c, config);
            aucs.push_back(eval::roc_auc(predict_proba(model, d.test_scores), d.test_labels));
        }
        const double m = mean(aucs);
        if (m > best_auc) {
            best_auc = m;
            best_c = c;
        }
    }
    return best_c;
}

LogisticModel train_model(std::span<const corpus::VulnRecord> records, scoring::ScoreMethod method,
                          const CvConfig& config) {
    const double c = select_c(records, method, config, config.inner_folds, derive_seed(config.seed, 0));
    std::optional<corpus::CwePrevalenceTable> table;
    if (scoring::requires_table(method)) table = corpus::compute_cwe_weights(records);
    const auto scores = scoring::score_all(records, table ? &*table : nullptr, method);
    const auto labels = labels_of(records);
    auto model = fit_logistic(scores, labels, class_weights(labels), {c, config.max_iter, config.tolerance});
    model.method = scoring::to_string(method);
    model.seed = config.seed;
    return model;
}

CvReport nested_cv(std::span<const corpus::VulnRecord> train, scoring::ScoreMethod method, const CvConfig& config) {
    if (config.outer_folds < 2 || config.inner_folds < 2) {
        throw Error(ErrorCode::configuration, "outer and inner folds must be >= 2");
    }
    CvReport report;
    report.method = scoring::to_string(method);
    const auto labels = labels_of(train);
    const auto outer = stratified_folds(labels, config.outer_folds, config.seed);
    std::vector<double> aucs, aps;
    for (int f = 0; f < config.outer_folds; ++f) {
        std::vector<corpus::VulnRecord> outer_train;
        for (std::size_t i = 0; i < train.size(); ++i) {
            if (outer[i] != f) outer_train.push_back(train[i]);
        }
        const double c = select_c(outer_train, method, config, config.inner_folds,
                                  derive_seed(config.seed, static_cast<std::uint64_t>(f) + 1));
        const auto d = make_fold(train, outer, f, method);
        const auto model = fit_fold(d, c, config);
        const auto probs = predict_proba(model, d.test_scores);
        CvFold row;
        row.fold = f;
        row.selected_c = c;
        row.roc_auc = eval::roc_auc(probs, d.test_labels);
        row.auprc = eval::average_precision(probs, d.test_labels);
        row.n_test = d.test_labels.size();
        row.n_positive = static_cast<std::size_t>(std::count(d.test_labels.begin(), d.test_labels.end(), Label{1}));
        aucs.push_back(row.roc_auc);
        aps.push_back(row.auprc);
        report.folds.push_back(row);
    }
    report.mean_roc_auc = mean(aucs);
    report.sd_roc_auc = sample_sd(aucs);
    report.mean_auprc = mean(aps);
    report.sd_auprc = sample_sd(aps);
    return report;
}

std::string to_json(const LogisticModel& m) {
    nlohmann::ordered_json j;
    j["beta0"] = m.beta0;
    j["beta1"] = m.beta1;
    j["c"] = m.c;
    j["converged"] = m.converged;
    j["iterations"] = m.iterations;
    j["method"] = m.method;
    j["seed"] = m.seed;
    return j.dump(2) + "\n";
}

LogisticModel model_from_json(std::string_view bytes) {
    auto j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::parse, "model file is not a JSON object");
    try {
        LogisticModel m;
        m.beta0 = j.at("beta0").get<double>();
        m.beta1 = j.at("beta1").get<double>();
        m.c = j.at("c").get<double>();
        m.converged = j.at("converged").get<bool>();
        m.iterations = j.at("iterations").get<int>();
        m.method = j.at("method").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse, std::string("model file: ") + e.what());
    }
}

std::string to_csv(const CvReport& r) {
    std::string out = "fold,selected_c,n_test,n_positive,roc_auc,auprc,roc_auc_sd,auprc_sd\n";
    std::map<double, int> c_votes;
    for (const auto& f : r.folds) {
        out += std::to_string(f.fold) + "," + format_double(f.selected_c) + "," + std::to_string(f.n_test) + "," +
               std::to_string(f.n_positive) + "," + format_double(f.roc_auc) + "," + format_double(f.auprc) + ",,\n";
        ++c_votes[f.selected_c];
    }
    double modal_c = 0.0;
    int votes = -1;
    for (const auto& [c, v] : c_votes) {
        if (v > votes) {
            votes = v;
            modal_c = c;
        }
    }
    std::size_t n_test = 0, n_pos = 0;
    for (const auto& f : r.folds) {
        n_test += f.n_test;
        n_pos += f.n_positive;
    }
    out += "aggregate," + format_double(modal_c) + "," + std::to_string(n_test) + "," + std::to_string(n_pos) + "," +
           format_double(r.mean_roc_auc) + "," + format_double(r.mean_auprc) + "," + format_double(r.sd_roc_auc) + "," +
           format_double(r.sd_auprc) + "\n";
    return out;
}

}  // namespace riskrank::learner
