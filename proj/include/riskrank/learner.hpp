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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "riskrank/common.hpp"
#include "riskrank/corpus.hpp"
#include "riskrank/scoring.hpp"

namespace riskrank::learner {

struct ClassWeights {
    double w_pos = 1.0;
    double w_neg = 1.0;
};

// Balanced scheme: w_c = n / (2 * n_c).
ClassWeights class_weights(std::span<const Label> labels);

struct LogisticModel {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double c = 1.0;
    bool converged = false;
    int iterations = 0;
    std::string method;
    std::uint64_t seed = 0;
};

struct FitOptions {
    double c = 1.0;
    int max_iter = 2000;
    double tolerance = 1e-8;
};

// Penalized weighted negative log-likelihood and its gradient at
// (beta0, beta1); the penalty beta1^2 / (2c) leaves the intercept free.
struct Objective {
    std::span<const double> scores;
    std::span<const Label> labels;
    ClassWeights weights;
    double c = 1.0;

    double value(double beta0, double beta1) const;
    std::array<double, 2> gradient(double beta0, double beta1) const;
};

/// Minimizes the objective with Newton steps and Armijo backtracking from
/// (0, 0). converged is set when the gradient max-norm reaches tolerance;
/// otherwise the last iterate is returned with converged = false.
LogisticModel fit_logistic(std::span<const double> scores, std::span<const Label> labels,
                           const ClassWeights& weights, const FitOptions& options = {});

// Numerically stable sigmoid(beta0 + beta1 * score).
double predict_proba(const LogisticModel& model, double score);
std::vector<double> predict_proba(const LogisticModel& model, std::span<const double> scores);

struct CvConfig {
    int outer_folds = 5;
    int inner_folds = 3;
    std::uint64_t seed = 42;
    std::vector<double> c_grid{0.1, 1.0, 10.0};
    int max_iter = 2000;
    double tolerance = 1e-8;
};

struct CvFold {
    int fold = 0;
    double selected_c = 0.0;
    double roc_auc = 0.0;
    double auprc = 0.0;
    std::size_t n_test = 0;
    std::size_t n_positive = 0;
};

struct CvReport {
    std::string method;
    std::vector<CvFold> folds;
    double mean_roc_auc = 0.0;
    double sd_roc_auc = 0.0;
    double mean_auprc = 0.0;
    double sd_auprc = 0.0;
};

// Fold id per record; each class is shuffled with the seed and dealt
// round-robin so fold class counts differ by at most one.
std::vector<int> stratified_folds(std::span<const Label> labels, int k, std::uint64_t seed);

// Inner-loop grid search: the C maximizing mean validation ROC-AUC over
// stratified folds of `records` (first grid point on ties). CWE weights are
// recomputed from each fold's training portion.
double select_c(std::span<const corpus::VulnRecord> records, scoring::ScoreMethod method, const CvConfig& config,
                int folds, std::uint64_t seed);

// Fits the final per-method model on `records`, choosing C by select_c.
LogisticModel train_model(std::span<const corpus::VulnRecord> records, scoring::ScoreMethod method,
                          const CvConfig& config);

CvReport nested_cv(std::span<const corpus::VulnRecord> train, scoring::ScoreMethod method, const CvConfig& config);

std::string to_json(const LogisticModel& model);
LogisticModel model_from_json(std::string_view bytes);
std::string to_csv(const CvReport& report);

}  // namespace riskrank::learner
