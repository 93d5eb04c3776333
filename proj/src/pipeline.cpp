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

#include "riskrank/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "riskrank/corpus.hpp"
#include "riskrank/decision.hpp"
#include "riskrank/feeds.hpp"
#include "riskrank/fetch.hpp"
#include "riskrank/io.hpp"
#include "riskrank/learner.hpp"
#include "riskrank/scoring.hpp"
#include "riskrank/stats.hpp"

namespace riskrank::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(Command command) {
    switch (command) {
    case Command::fetch: return "fetch";
    case Command::build: return "build";
    case Command::score: return "score";
    case Command::train: return "train";
    case Command::eval: return "eval";
    case Command::decision: return "decision";
    case Command::report: return "report";
    }
    return "unknown";
}

std::optional<Command> parse_command(std::string_view text) {
    for (auto c : {Command::fetch, Command::build, Command::score, Command::train, Command::eval, Command::decision,
                   Command::report}) {
        if (text == to_string(c)) return c;
    }
    return std::nullopt;
}

int exit_code_for(Command command, const Error& error) {
    switch (error.code()) {
    case ErrorCode::usage: return 2;
    case ErrorCode::missing_input: return command == Command::build ? 4 : 6;
    case ErrorCode::stratification:
    case ErrorCode::cross_validation:
    case ErrorCode::weighting: return 5;
    default: break;
    }
    switch (command) {
    case Command::fetch: return 3;
    case Command::build: return 4;
    case Command::train: return 5;
    default: return 1;
    }
}

namespace {

constexpr feeds::FeedSource all_sources[] = {feeds::FeedSource::kev, feeds::FeedSource::epss, feeds::FeedSource::cve};

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string percent(double v) { return fixed(100.0 * v, 1) + "%"; }

fs::path out_path(const RunConfig& cfg, const std::string& name) { return cfg.output_dir / name; }

std::string read_required(const RunConfig& cfg, const std::string& name, const char* producer) {
    const auto path = out_path(cfg, name);
    if (!fs::exists(path)) {
        throw Error(ErrorCode::missing_input,
                    path.string() + " not found; run `" + std::string(producer) + "` first");
    }
    return io::read_file(path);
}

std::vector<std::string> source_list(const std::string& text) {
    std::vector<std::string> out;
    for (const auto& part : split(text, ',')) {
        auto item = trim(part);
        if (!item.empty()) out.emplace_back(item);
    }
    return out;
}

std::string url_for(const RunConfig& cfg, feeds::FeedSource s) {
    switch (s) {
    case feeds::FeedSource::kev: return cfg.kev_url;
    case feeds::FeedSource::epss: return cfg.epss_url;
    case feeds::FeedSource::cve: return cfg.cve_source;
    }
    return {};
}

// Configuration as recorded in the manifest. Cache and output locations are
// omitted so identical runs in different directories record identical bytes.
ordered_json config_snapshot(const RunConfig& cfg) {
    ordered_json j;
    for (const auto& key : RunConfig::keys()) {
        if (key == "cache_dir" || key == "output_dir") continue;
        j[key] = cfg.get(key);
    }
    return j;
}

void write_manifest(const RunConfig& cfg) {
    ordered_json m;
    m["tool"] = "riskrank";
    m["tool_version"] = tool_version;
    m["config"] = config_snapshot(cfg);
    ordered_json feeds_j = ordered_json::object();
    for (auto s : all_sources) {
        try {
            if (auto snap = feeds::read_cached_snapshot(s, cfg.cache_dir)) feeds_j[feeds::to_string(s)] = snap->content_digest;
        } catch (const Error&) {
            feeds_j[feeds::to_string(s)] = nullptr;
        }
    }
    m["feeds"] = feeds_j;
    const auto prov_path = out_path(cfg, "dataset.provenance.json");
    if (fs::exists(prov_path)) {
        m["dataset"] = ordered_json::parse(io::read_file(prov_path));
        m["dataset_digest"] = io::sha256_hex(io::read_file(out_path(cfg, "dataset.jsonl")));
    }
    io::write_file_atomic(out_path(cfg, "manifest.json"), m.dump(2) + "\n");
}

void record_timing(const RunConfig& cfg, Command command, double seconds) {
    const auto path = out_path(cfg, "timings.json");
    ordered_json j = ordered_json::object();
    if (fs::exists(path)) {
        auto parsed = ordered_json::parse(io::read_file(path), nullptr, false);
        if (parsed.is_object()) j = std::move(parsed);
    }
    j[to_string(command)] = seconds;
    io::write_file_atomic(path, j.dump(2) + "\n");
}

corpus::Dataset load_dataset(const RunConfig& cfg) {
    corpus::Dataset d;
    d.records = corpus::records_from_jsonl(read_required(cfg, "dataset.jsonl", "build"));
    corpus::apply_provenance_json(d, read_required(cfg, "dataset.provenance.json", "build"));
    return d;
}

// The evaluation partition plus the training-set CWE table.
struct Partition {
    corpus::Dataset dataset;
    std::vector<corpus::VulnRecord> train;
    std::vector<corpus::VulnRecord> test;
    std::vector<bool> is_test;  // per dataset record
};

Partition partition(const RunConfig& cfg) {
    Partition p;
    p.dataset = load_dataset(cfg);
    const auto labels = p.dataset.labels();
    const auto test_idx = corpus::stratified_test_indices(labels, {cfg.train_fraction, cfg.seed});
    p.is_test.assign(p.dataset.records.size(), false);
    for (auto i : test_idx) p.is_test[i] = true;
    for (std::size_t i = 0; i < p.dataset.records.size(); ++i) {
        (p.is_test[i] ? p.test : p.train).push_back(p.dataset.records[i]);
    }
    return p;
}

std::vector<Label> labels_of(std::span<const corpus::VulnRecord> records) {
    std::vector<Label> out;
    for (const auto& r : records) out.push_back(r.kev ? 1 : 0);
    return out;
}

// scores.csv, grouped by method in file order.
struct MethodScores {
    std::string method;
    std::unordered_map<std::string, double> by_id;
    std::vector<std::string> order;
};

std::vector<MethodScores> load_scores(const RunConfig& cfg) {
    const auto text = read_required(cfg, "scores.csv", "score");
    std::vector<MethodScores> out;
    std::map<std::string, std::size_t, std::less<>> index;
    bool header = true;
    for (const auto& raw : split(text, '\n')) {
        auto line = trim(raw);
        if (line.empty()) continue;
        if (header) {
            if (line != "cve_id,method,score,rank") throw Error(ErrorCode::format, "scores.csv has an unexpected header");
            header = false;
            continue;
        }
        auto f = split(line, ',');
        if (f.size() != 4) throw Error(ErrorCode::format, "bad scores.csv row: " + std::string(line));
        auto [it, fresh] = index.emplace(f[1], out.size());
        if (fresh) out.push_back({f[1], {}, {}});
        auto& ms = out[it->second];
        ms.by_id[f[0]] = std::strtod(f[2].c_str(), nullptr);
        ms.order.push_back(f[0]);
    }
    return out;
}

std::vector<double> aligned(const MethodScores& ms, std::span<const corpus::VulnRecord> records) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        auto it = ms.by_id.find(r.cve_id);
        if (it == ms.by_id.end()) {
            throw Error(ErrorCode::missing_input, "scores.csv has no " + ms.method + " score for " + r.cve_id +
                                                      "; rerun `score`");
        }
        out.push_back(it->second);
    }
    return out;
}

scoring::ScoredRanking ranking_of(const MethodScores& ms) {
    scoring::ScoredRanking r;
    r.method = ms.method;
    r.scores = ms.by_id;
    r.order = ms.order;
    return r;
}

const MethodScores& find_scores(const std::vector<MethodScores>& all, scoring::ScoreMethod m) {
    for (const auto& ms : all) {
        if (ms.method == scoring::to_string(m)) return ms;
    }
    throw Error(ErrorCode::missing_input, std::string("scores.csv has no rows for ") + scoring::to_string(m) +
                                              "; rerun `score` with this method");
}

std::vector<std::size_t> clip_budgets(const std::vector<std::size_t>& budgets, std::size_t n,
                                      std::vector<std::string>& warnings) {
    std::vector<std::size_t> out;
    for (auto k : budgets) {
        if (k > n) {
            warnings.push_back("budget " + std::to_string(k) + " exceeds the " + std::to_string(n) +
                               " evaluated records; clipped to " + std::to_string(n));
            k = n;
        }
        out.push_back(k);
    }
    return out;
}

ordered_json metric_json(const eval::MetricValue& v) {
    ordered_json j;
    j["value"] = v.value;
    j["ci_low"] = v.ci_low ? ordered_json(*v.ci_low) : nullptr;
    j["ci_high"] = v.ci_high ? ordered_json(*v.ci_high) : nullptr;
    j["n"] = v.n;
    return j;
}

template <typename F>
ordered_json maybe(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() != ErrorCode::metric) throw;
        return nullptr;
    }
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace

CommandResult cmd_fetch(const RunConfig& cfg) {
    CommandResult result;
    for (auto s : all_sources) {
        feeds::FetchRequest req;
        req.source = s;
        req.urls = source_list(url_for(cfg, s));
        req.cache_dir = cfg.cache_dir;
        req.offline = cfg.offline;
        req.max_age = std::chrono::seconds(static_cast<long long>(cfg.max_age_hours * 3600.0));
        if (s == feeds::FeedSource::cve && req.urls.size() > 1) {
            req.combine = [](std::vector<std::string> parts) {
                std::vector<feeds::CveEntry> all;
                for (const auto& p : parts) {
                    auto entries = feeds::parse_cve_records(p);
                    all.insert(all.end(), std::make_move_iterator(entries.begin()), std::make_move_iterator(entries.end()));
                }
                return feeds::to_jsonl(all);
            };
        }
        const auto snap = feeds::fetch_snapshot(req);
        if (snap.stale) result.warnings.push_back(snap.warning);
        result.summary += std::string(feeds::to_string(s)) + " " + snap.content_digest.substr(0, 16) +
                          " retrieved_at=" + std::to_string(snap.retrieved_at) + (snap.stale ? " (stale)" : "") + "\n";
    }
    return result;
}

CommandResult cmd_build(const RunConfig& cfg) {
    std::map<feeds::FeedSource, std::string> payload;
    for (auto s : all_sources) {
        auto snap = feeds::read_cached_snapshot(s, cfg.cache_dir);
        if (!snap) {
            throw Error(ErrorCode::missing_input, std::string("no cached ") + feeds::to_string(s) +
                                                      " snapshot; run `fetch` first");
        }
        payload[s] = io::read_file(snap->payload_path);
    }
    const auto kev = feeds::parse_kev_catalog(payload[feeds::FeedSource::kev]);
    const auto epss = feeds::parse_epss_snapshot(payload[feeds::FeedSource::epss]);
    const auto cves = feeds::parse_cve_records(payload[feeds::FeedSource::cve]);
    const auto dataset = corpus::merge(cves, epss, kev, {cfg.kev_window_days});
    fs::create_directories(cfg.output_dir);
    io::write_file_atomic(out_path(cfg, "dataset.jsonl"), corpus::to_jsonl(dataset.records));
    io::write_file_atomic(out_path(cfg, "dataset.provenance.json"), corpus::provenance_json(dataset));
    const auto& p = dataset.provenance;
    CommandResult result;
    result.summary = "dataset: " + std::to_string(p.kept) + " records, " + std::to_string(p.positives) +
                     " KEV positives; dropped " + std::to_string(p.dropped_missing_epss) + " without EPSS, " +
                     std::to_string(p.dropped_missing_severity) + " without severity, " +
                     std::to_string(p.dropped_zero_score) + " scored 0.0\n";
    if (p.positives == 0) result.warnings.push_back("dataset has no KEV positives");
    return result;
}

CommandResult cmd_score(const RunConfig& cfg) {
    const auto part = partition(cfg);
    const auto table = corpus::compute_cwe_weights(part.train);
    std::string split_csv = "cve_id,partition\n";
    for (std::size_t i = 0; i < part.dataset.records.size(); ++i) {
        split_csv += part.dataset.records[i].cve_id + (part.is_test[i] ? ",test\n" : ",train\n");
    }
    std::vector<std::string> ids;
    for (const auto& r : part.test) ids.push_back(r.cve_id);
    std::string scores_csv = "cve_id,method,score,rank\n";
    CommandResult result;
    for (auto m : cfg.methods) {
        const auto scores = scoring::score_all(part.test, &table, m);
        scores_csv += scoring::to_csv_rows(scoring::rank(scoring::to_string(m), ids, scores));
        result.summary += std::string(scoring::to_string(m)) + ": scored " + std::to_string(scores.size()) + " test records\n";
    }
    io::write_file_atomic(out_path(cfg, "split.csv"), split_csv);
    io::write_file_atomic(out_path(cfg, "cwe_weights.csv"), corpus::to_csv(table, cfg.seed));
    io::write_file_atomic(out_path(cfg, "scores.csv"), scores_csv);
    return result;
}

namespace {

learner::CvConfig cv_config(const RunConfig& cfg) {
    learner::CvConfig c;
    c.outer_folds = cfg.outer_folds;
    c.inner_folds = cfg.inner_folds;
    c.seed = cfg.seed;
    c.c_grid = cfg.c_grid;
    c.max_iter = cfg.max_iter;
    c.tolerance = cfg.tolerance;
    return c;
}

}  // namespace

CommandResult cmd_train(const RunConfig& cfg) {
    const auto part = partition(cfg);
    const auto config = cv_config(cfg);
    CommandResult result;
    for (auto m : cfg.methods) {
        const auto name = std::string(scoring::to_string(m));
        const auto report = learner::nested_cv(part.train, m, config);
        const auto model = learner::train_model(part.train, m, config);
        io::write_file_atomic(out_path(cfg, "cv_" + name + ".csv"), learner::to_csv(report));
        io::write_file_atomic(out_path(cfg, "model_" + name + ".json"), learner::to_json(model));
        if (!model.converged) result.warnings.push_back(name + ": logistic fit did not converge");
        result.summary += name + ": outer ROC-AUC " + fixed(report.mean_roc_auc, 3) + " +/- " +
                          fixed(report.sd_roc_auc, 3) + ", AUPRC " + fixed(report.mean_auprc, 3) + "; C=" +
                          format_double(model.c) + " beta1=" + fixed(model.beta1, 4) + "\n";
    }
    return result;
}

namespace {

// Re-throws evaluation errors with the method (or pair) they came from.
template <typename F>
auto for_method(const std::string& name, F&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.code(), name + ": " + e.what(), e.position());
    }
}

}  // namespace

CommandResult cmd_eval(const RunConfig& cfg) {
    const auto part = partition(cfg);
    const auto table = corpus::table_from_csv(read_required(cfg, "cwe_weights.csv", "score"));
    const auto all_scores = load_scores(cfg);
    const auto labels = labels_of(part.test);
    const eval::BootstrapOptions boot{cfg.resamples, cfg.seed, true};

    ordered_json report;
    report["schema"] = "riskrank.evaluation/1";
    report["n_test"] = part.test.size();
    report["n_positive"] = std::count(labels.begin(), labels.end(), Label{1});
    report["resamples"] = cfg.resamples;
    report["seed"] = cfg.seed;

    std::vector<std::vector<double>> probs;
    ordered_json methods = ordered_json::array();
    CommandResult result;
    for (auto m : cfg.methods) {
        const auto name = std::string(scoring::to_string(m));
        const auto model = learner::model_from_json(read_required(cfg, "model_" + name + ".json", "train"));
        const auto scores = aligned(find_scores(all_scores, m), part.test);
        auto p = learner::predict_proba(model, scores);
        ordered_json j;
        j["method"] = name;
        j["model"] = {{"beta0", model.beta0}, {"beta1", model.beta1}, {"c", model.c}, {"converged", model.converged}};
        const auto auc = for_method(name, [&] { return eval::bootstrap_ci(eval::Metric::roc_auc, p, labels, boot); });
        const auto ap = for_method(name, [&] { return eval::bootstrap_ci(eval::Metric::auprc, p, labels, boot); });
        j["roc_auc"] = metric_json(auc);
        j["auprc"] = metric_json(ap);
        for_method(name, [&] {
            j["brier"] = {{"value", eval::brier(p, labels)}, {"n", p.size()}};
            j["score_roc_auc"] = eval::roc_auc(scores, labels);
            j["score_auprc"] = eval::average_precision(scores, labels);
        });
        methods.push_back(std::move(j));
        result.summary += name + ": ROC-AUC " + fixed(auc.value, 3) + " [" + fixed(*auc.ci_low, 3) + ", " +
                          fixed(*auc.ci_high, 3) + "], AUPRC " + fixed(ap.value, 4) + "\n";
        probs.push_back(std::move(p));
    }
    report["methods"] = std::move(methods);

    // Holm families: one per test kind, over all method pairs.
    std::vector<eval::ComparisonResult> delong, boot_tests;
    for (std::size_t a = 0; a < cfg.methods.size(); ++a) {
        for (std::size_t b = a + 1; b < cfg.methods.size(); ++b) {
            const auto pair = std::string(scoring::to_string(cfg.methods[a])) + " vs " + scoring::to_string(cfg.methods[b]);
            auto d = for_method(pair, [&] { return eval::delong_test(probs[a], probs[b], labels); });
            auto pb = for_method(pair, [&] {
                return eval::paired_bootstrap_test(eval::Metric::auprc, probs[a], probs[b], labels, boot);
            });
            for (auto* c : {&d, &pb}) {
                c->method_a = scoring::to_string(cfg.methods[a]);
                c->method_b = scoring::to_string(cfg.methods[b]);
            }
            delong.push_back(d);
            boot_tests.push_back(pb);
        }
    }
    ordered_json comparisons = ordered_json::array();
    for (auto* family : {&delong, &boot_tests}) {
        std::vector<double> pv;
        for (const auto& c : *family) pv.push_back(c.p_value);
        const auto adj = eval::holm_adjust(pv);
        for (std::size_t i = 0; i < family->size(); ++i) {
            auto& c = (*family)[i];
            c.p_adjusted = adj[i];
            ordered_json j;
            j["method_a"] = c.method_a;
            j["method_b"] = c.method_b;
            j["metric"] = eval::to_string(c.metric);
            j["test"] = eval::to_string(c.test);
            j["value_a"] = c.value_a;
            j["value_b"] = c.value_b;
            j["delta"] = c.delta;
            j["ci_low"] = c.ci_low;
            j["ci_high"] = c.ci_high;
            j["p_value"] = c.p_value;
            j["p_adjusted"] = c.p_adjusted;
            j["degenerate_variance"] = c.degenerate_variance;
            comparisons.push_back(std::move(j));
        }
    }
    report["comparisons"] = std::move(comparisons);

    // Correlation triple on the evaluation partition: ordinal SM, KRI, KEV flag.
    const auto sm = scoring::score_all(part.test, nullptr, scoring::ScoreMethod::sm_ordinal);
    const auto kri = scoring::score_all(part.test, &table, scoring::ScoreMethod::kri);
    std::vector<double> kev(labels.begin(), labels.end());
    report["correlation"] = {{"sm_kri", maybe([&] { return ordered_json(eval::pearson_r(sm, kri)); })},
                             {"sm_kev", maybe([&] { return ordered_json(eval::pearson_r(sm, kev)); })},
                             {"kri_kev", maybe([&] { return ordered_json(eval::pearson_r(kri, kev)); })}};

    ordered_json transforms = ordered_json::array();
    for (auto t : scoring::all_transforms) {
        const auto tx = scoring::transform(kri, t);
        transforms.push_back({{"transform", scoring::to_string(t)},
                              {"roc_auc", eval::roc_auc(tx, labels)},
                              {"auprc", eval::average_precision(tx, labels)}});
    }
    report["kri_transforms"] = std::move(transforms);

    io::write_file_atomic(out_path(cfg, "evaluation.json"), report.dump(2) + "\n");
    return result;
}

CommandResult cmd_decision(const RunConfig& cfg) {
    const auto part = partition(cfg);
    const auto all_scores = load_scores(cfg);
    CommandResult result;
    const std::size_t n = part.test.size();
    const auto budgets = clip_budgets(cfg.budgets, n, result.warnings);
    std::vector<std::string> k_warn;
    const std::size_t recall_k = clip_budgets({cfg.recall_k}, n, k_warn).front();
    for (auto& w : k_warn) result.warnings.push_back("recall_k: " + w);

    eval::LabelMap labels;
    std::unordered_map<std::string, Band> strata;
    std::unordered_map<std::string, int> weights;
    for (const auto& r : part.test) {
        labels[r.cve_id] = r.kev;
        strata[r.cve_id] = r.severity_band;
        weights[r.cve_id] = scoring::cvss_weight(r.severity_band);
    }
    std::vector<scoring::ScoredRanking> rankings;
    for (auto m : cfg.methods) {
        const auto& ms = find_scores(all_scores, m);
        (void)aligned(ms, part.test);
        rankings.push_back(ranking_of(ms));
    }

    std::string fig5 = "k,method,precision\n";
    std::string fig6 = "band,method,recall_at_k\n";
    std::string fig6b = "k,band,method,recall_at_k\n";
    for (auto k : budgets) {
        for (const auto& r : rankings) {
            fig5 += std::to_string(k) + "," + r.method + "," + format_double(eval::precision_at_k(r, labels, k)) + "\n";
        }
    }
    for (auto band : {Band::critical, Band::high, Band::medium, Band::low}) {
        for (const auto& r : rankings) {
            auto rec = eval::recall_at_k_stratified(r, labels, strata, recall_k);
            if (auto it = rec.find(band); it != rec.end()) {
                fig6 += std::string(to_string(band)) + "," + r.method + "," + format_double(it->second) + "\n";
            }
        }
        for (auto k : budgets) {
            for (const auto& r : rankings) {
                auto rec = eval::recall_at_k_stratified(r, labels, strata, k);
                if (auto it = rec.find(band); it != rec.end()) {
                    fig6b += std::to_string(k) + "," + to_string(band) + "," + r.method + "," + format_double(it->second) + "\n";
                }
            }
        }
    }

    const auto erv = eval::erv_simulation(rankings, labels, weights, budgets, cfg.random_trials, cfg.seed);
    std::string fig7 = "budget,method,erv_raw,erv_normalized,lift\n";
    for (std::size_t b = 0; b < budgets.size(); ++b) {
        const auto row = [&](const eval::ErvSeries& s) {
            fig7 += std::to_string(budgets[b]) + "," + s.method + "," + format_double(s.raw[b]) + "," +
                    format_double(s.normalized[b]) + "," + format_double(s.lift[b]) + "\n";
        };
        for (const auto& s : erv.methods) row(s);
        row(erv.oracle);
        fig7 += std::to_string(budgets[b]) + ",random," + format_double(erv.random_expected[b]) + "," +
                format_double(erv.random_expected[b] / erv.oracle.raw[b]) + ",1\n";
    }

    const std::size_t at_k[] = {recall_k};
    const auto erv_k = eval::erv_simulation(rankings, labels, weights, at_k, 0, cfg.seed);
    ordered_json j;
    j["schema"] = "riskrank.decision/1";
    j["n"] = n;
    j["budgets"] = budgets;
    j["recall_k"] = recall_k;
    ordered_json per_method = ordered_json::array();
    for (std::size_t i = 0; i < rankings.size(); ++i) {
        const auto& r = rankings[i];
        ordered_json m;
        m["method"] = r.method;
        std::vector<double> prec, rec;
        for (auto k : budgets) {
            prec.push_back(eval::precision_at_k(r, labels, k));
            rec.push_back(eval::recall_at_k(r, labels, k));
        }
        m["precision_at_budget"] = prec;
        m["kev_recall_at_budget"] = rec;
        m["kev_recall_at_k"] = eval::recall_at_k(r, labels, recall_k);
        ordered_json strat = ordered_json::object();
        for (const auto& [band, v] : eval::recall_at_k_stratified(r, labels, strata, recall_k)) strat[to_string(band)] = v;
        m["stratified_recall_at_k"] = strat;
        m["erv_normalized_at_k"] = erv_k.methods[i].normalized.front();
        m["erv_raw"] = erv.methods[i].raw;
        m["erv_normalized"] = erv.methods[i].normalized;
        m["erv_lift"] = erv.methods[i].lift;
        per_method.push_back(std::move(m));
        result.summary += r.method + ": KEV recall@" + std::to_string(recall_k) + " " +
                          percent(eval::recall_at_k(r, labels, recall_k)) + ", ERV@" + std::to_string(recall_k) + " " +
                          percent(erv_k.methods[i].normalized.front()) + " of oracle\n";
    }
    j["methods"] = std::move(per_method);
    j["erv"] = {{"total_value", erv.total_value},
                {"oracle_raw", erv.oracle.raw},
                {"random_expected", erv.random_expected},
                {"random_mc_mean", erv.random_mc_mean},
                {"random_mc_se", erv.random_mc_se},
                {"random_trials", cfg.random_trials}};

    io::write_file_atomic(out_path(cfg, "fig5.csv"), fig5);
    io::write_file_atomic(out_path(cfg, "fig6.csv"), fig6);
    io::write_file_atomic(out_path(cfg, "fig6_budgets.csv"), fig6b);
    io::write_file_atomic(out_path(cfg, "fig7.csv"), fig7);
    io::write_file_atomic(out_path(cfg, "decision.json"), j.dump(2) + "\n");
    return result;
}

CommandResult cmd_report(const RunConfig& cfg) {
    const auto evaluation = json::parse(read_required(cfg, "evaluation.json", "eval"));
    const auto decision = json::parse(read_required(cfg, "decision.json", "decision"));
    const auto manifest_bytes = read_required(cfg, "manifest.json", "build");
    const auto manifest = json::parse(manifest_bytes);
    const auto k = decision.at("recall_k").get<std::size_t>();
    const auto ks = std::to_string(k);

    std::vector<std::string> names;
    std::map<std::string, json> ev, dv;
    for (const auto& m : evaluation.at("methods")) {
        names.push_back(m.at("method").get<std::string>());
        ev[names.back()] = m;
    }
    for (const auto& m : decision.at("methods")) dv[m.at("method").get<std::string>()] = m;
    for (const auto& name : names) {
        if (!dv.count(name)) throw Error(ErrorCode::missing_input, "decision.json lacks method " + name + "; rerun `decision`");
    }

    std::string md = "# Vulnerability prioritization report\n\n";
    md += "Manifest digest: `" + io::sha256_hex(manifest_bytes) + "`\n\n";
    if (manifest.contains("dataset")) {
        const auto& d = manifest.at("dataset");
        md += "Dataset as of " + d.value("created_at", std::string("?")) + ": " +
              std::to_string(d.value("kept", 0)) + " CVEs, " + std::to_string(d.value("positives", 0)) +
              " KEV positives.\n";
    }
    md += "Evaluation partition: " + std::to_string(evaluation.at("n_test").get<std::size_t>()) + " CVEs, " +
          std::to_string(evaluation.at("n_positive").get<std::size_t>()) + " positives.\n\n";

    md += "## Performance profile\n\n| Metric |";
    for (const auto& n : names) md += " " + n + " |";
    md += "\n|---|";
    for (std::size_t i = 0; i < names.size(); ++i) md += "---|";
    md += "\n";
    auto row = [&](const std::string& label, auto&& cell) {
        md += "| " + label + " |";
        for (const auto& n : names) md += " " + cell(n) + " |";
        md += "\n";
    };
    row("ROC-AUC", [&](const std::string& n) { return fixed(ev[n].at("roc_auc").at("value").get<double>(), 3); });
    row("AUPRC", [&](const std::string& n) { return fixed(ev[n].at("auprc").at("value").get<double>(), 3); });
    row("KEV Recall@" + ks, [&](const std::string& n) { return percent(dv[n].at("kev_recall_at_k").get<double>()); });
    row("ERV@" + ks + " (norm.)", [&](const std::string& n) { return percent(dv[n].at("erv_normalized_at_k").get<double>()); });
    row("Critical Recall@" + ks, [&](const std::string& n) {
        const auto& s = dv[n].at("stratified_recall_at_k");
        return s.contains("critical") ? percent(s.at("critical").get<double>()) : std::string("n/a");
    });

    md += "\n## Pairwise comparisons (Holm-adjusted)\n\n| A | B | Metric | Test | Delta | 95% CI | p | p (Holm) |\n"
          "|---|---|---|---|---|---|---|---|\n";
    for (const auto& c : evaluation.at("comparisons")) {
        md += "| " + c.at("method_a").get<std::string>() + " | " + c.at("method_b").get<std::string>() + " | " +
              c.at("metric").get<std::string>() + " | " + c.at("test").get<std::string>() + " | " +
              fixed(c.at("delta").get<double>(), 4) + " | [" + fixed(c.at("ci_low").get<double>(), 4) + ", " +
              fixed(c.at("ci_high").get<double>(), 4) + "] | " + fixed(c.at("p_value").get<double>(), 4) + " | " +
              fixed(c.at("p_adjusted").get<double>(), 4) + " |\n";
    }

    const auto& corr = evaluation.at("correlation");
    auto corr_text = [&](const char* key) {
        return corr.at(key).is_null() ? std::string("undefined") : fixed(corr.at(key).get<double>(), 3);
    };
    md += "\n## Correlation\n\nr(SM, KRI) = " + corr_text("sm_kri") + ", r(SM, KEV) = " + corr_text("sm_kev") +
          ", r(KRI, KEV) = " + corr_text("kri_kev") + "\n";

    auto best = [&](auto&& value) {
        std::string arg = names.front();
        for (const auto& n : names) {
            if (value(n) > value(arg)) arg = n;
        }
        return arg;
    };
    const auto coverage = best([&](const std::string& n) { return dv[n].at("kev_recall_at_k").get<double>(); });
    const auto weighted = best([&](const std::string& n) { return dv[n].at("erv_normalized_at_k").get<double>(); });
    const auto ranking = best([&](const std::string& n) { return ev[n].at("auprc").at("value").get<double>(); });
    md += "\n## Decision guide\n\n";
    md += "- Raw exploit coverage at k=" + ks + " (every exploited CVE weighted equally): prefer `" + coverage + "` (KEV recall " +
          percent(dv[coverage].at("kev_recall_at_k").get<double>()) + ").\n";
    md += "- Severity-weighted risk reduction at k=" + ks + ": prefer `" + weighted + "` (" +
          percent(dv[weighted].at("erv_normalized_at_k").get<double>()) + " of oracle ERV).\n";
    md += "- Highest precision-recall ranking quality: `" + ranking + "` (AUPRC " +
          fixed(ev[ranking].at("auprc").at("value").get<double>(), 3) + ").\n";
    for (const char* sm : {"sm_ordinal", "sm_continuous"}) {
        if (dv.count(sm)) {
            md += std::string("- Severity-only baseline `") + sm + "` captures " +
                  percent(dv[sm].at("erv_normalized_at_k").get<double>()) + " of oracle ERV at k=" + ks + ".\n";
        }
    }

    io::write_file_atomic(out_path(cfg, "report.md"), md);
    CommandResult result;
    result.summary = "wrote " + out_path(cfg, "report.md").string() + "\n";
    return result;
}

CommandResult run(Command command, const RunConfig& cfg) {
    Timer timer;
    std::optional<io::FileLock> lock;
    if (command != Command::fetch) {
        fs::create_directories(cfg.output_dir);
        lock.emplace(cfg.output_dir / ".lock");
    }
    CommandResult result;
    switch (command) {
    case Command::fetch: result = cmd_fetch(cfg); break;
    case Command::build: result = cmd_build(cfg); break;
    case Command::score: result = cmd_score(cfg); break;
    case Command::train: result = cmd_train(cfg); break;
    case Command::eval: result = cmd_eval(cfg); break;
    case Command::decision: result = cmd_decision(cfg); break;
    case Command::report: result = cmd_report(cfg); break;
    }
    if (command != Command::fetch) {
        if (command != Command::report) write_manifest(cfg);
        record_timing(cfg, command, timer.seconds());
    }
    return result;
}

}  // namespace riskrank::pipeline
