// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "osp/data_io.hpp"
#include "osp/engine.hpp"
#include "osp/errors.hpp"
#include "osp/evaluation.hpp"
#include "osp/features.hpp"
#include "osp/metrics.hpp"
#include "test_util.hpp"

using namespace osp;

namespace {

struct Criterion {
    bool pass = true;
    std::string detail;

    void require(bool condition, const std::string& message) {
        if (!condition && pass) {
            pass = false;
            detail = message;
        }
    }
};

// ---------------------------------------------------------------- criterion 1

Criterion metric_exactness() {
    Criterion c;
    const double tol = 1e-12;
    c.require(std::abs(mase(std::vector<double>{1, 2, 3, 4}, std::vector<double>{5, 6},
                            std::vector<double>{4, 4}) -
                       1.5) <= tol,
              "mase example 1 != 1.5");
    c.require(mase(std::vector<double>{1, 2, 3, 4}, std::vector<double>{5, 6},
                   std::vector<double>{5, 6}) == 0.0,
              "mase of a perfect forecast != 0");
    c.require(std::abs(mase(std::vector<double>{0, 2, 0, 2}, std::vector<double>{3, 1},
                            std::vector<double>{1, 1}) -
                       0.5) <= tol,
              "mase example 3 != 0.5");
    c.require(std::abs(mape(std::vector<double>{100, 100}, std::vector<double>{90, 110}) -
                       10.0) <= tol,
              "mape example 1 != 10.0");
    c.require(mape(std::vector<double>{50, 25}, std::vector<double>{50, 25}) == 0.0,
              "mape of a perfect forecast != 0");
    bool threw = false;
    try {
        mape(std::vector<double>{0, 5}, std::vector<double>{1, 1});
    } catch (const UndefinedMetricError&) {
        threw = true;
    }
    c.require(threw, "mape with a zero actual did not raise");
    return c;
}

// ---------------------------------------------------------------- criterion 2

struct OracleLabeling {
    std::vector<std::vector<std::optional<double>>> matrix;
    int label_actual = 0;
    int label_average = 0;
};

OracleLabeling label_oracle(const TimeSeries& series, const SegmentationConfig& config,
                            const ForecasterSpec& spec) {
    const int t_train = series.length() - config.h;
    std::vector<double> train(series.values.begin(), series.values.begin() + t_train);
    std::vector<double> holdout(series.values.begin() + t_train, series.values.end());

    OracleLabeling oracle;
    oracle.matrix.assign(config.m, std::vector<std::optional<double>>(config.n, std::nullopt));
    for (int i = 1; i <= config.m; ++i) {
        const int lo = (i - 1) * t_train / config.m;
        const int hi = i * t_train / config.m;
        for (int j = 1; j <= config.n; ++j) {
            const int idx = lo + j * (hi - lo) / (config.n + 1);
            if (t_train - idx < config.min_len) continue;
            TimeSeries suffix;
            suffix.frequency = series.frequency;
            suffix.id = series.id;
            suffix.values.assign(train.begin() + idx, train.end());
            try {
                const Forecast fc = forecast(spec, suffix, config.h);
                oracle.matrix[i - 1][j - 1] = mase(suffix.values, holdout, fc.values);
            } catch (const Error&) {
            }
        }
    }
    double best_min = std::numeric_limits<double>::infinity();
    double best_avg = std::numeric_limits<double>::infinity();
    for (int i = 0; i < config.m; ++i) {
        double lowest = std::numeric_limits<double>::infinity();
        double sum = 0.0;
        int count = 0;
        for (const auto& cell : oracle.matrix[i]) {
            if (!cell) continue;
            lowest = std::min(lowest, *cell);
            sum += *cell;
            ++count;
        }
        if (count == 0) continue;
        if (lowest <= best_min) {
            best_min = lowest;
            oracle.label_actual = i + 1;
        }
        if (sum / count <= best_avg) {
            best_avg = sum / count;
            oracle.label_average = i + 1;
        }
    }
    return oracle;
}

Criterion labeling_oracle_equivalence() {
    Criterion c;
    SyntheticSpec spec;
    spec.count = 50;
    spec.min_length = 80;
    spec.max_length = 150;
    spec.break_probability = 0.5;
    spec.seed = 424242;
    spec.pre.level = 50.0;
    spec.pre.ar = 0.9;
    spec.pre.noise_sd = 2.0;
    spec.post.level = 58.0;
    spec.post.ar = 0.2;
    spec.post.noise_sd = 2.0;
    const std::vector<TimeSeries> corpus = generate_synthetic(spec);

    SegmentationConfig config;
    config.m = 5;
    config.n = 4;
    config.h = 6;
    config.min_len = default_min_len(config.h, 1);

    for (ForecasterKind kind : {ForecasterKind::naive, ForecasterKind::ses}) {
        const ForecasterSpec base{.kind = kind};
        for (const TimeSeries& series : corpus) {
            LabeledExample ex;
            try {
                ex = label_series(series, config, base);
            } catch (const Error& e) {
                c.require(false, "series " + series.id + " unexpectedly ineligible: " + e.what());
                continue;
            }
            const OracleLabeling oracle = label_oracle(series, config, base);
            c.require(ex.label_actual.interval == oracle.label_actual,
                      series.id + ": label_actual mismatch");
            c.require(ex.label_average.interval == oracle.label_average,
                      series.id + ": label_average mismatch");
            for (int i = 0; i < config.m; ++i) {
                for (int j = 0; j < config.n; ++j) {
                    const auto& got = ex.error_matrix[i][j];
                    const auto& want = oracle.matrix[i][j];
                    c.require(got.has_value() == want.has_value(),
                              series.id + ": cell presence mismatch");
                    if (got && want) {
                        c.require(*got == *want, series.id + ": cell value mismatch");
                    }
                }
            }
        }
    }
    if (c.pass) c.detail = "50 series x {naive, ses}: exact match";
    return c;
}

// ---------------------------------------------------------------- criterion 3

Criterion gbdt_sanity() {
    Criterion c;

    // Separable threshold, perfect within 20 rounds.
    {
        Rng rng(7001);
        Matrix x;
        std::vector<double> y;
        for (int i = 0; i < 200; ++i) {
            const double v = rng.uniform();
            x.push_back({v});
            y.push_back(v > 0.5 ? 2.0 : 1.0);
        }
        GbdtParams params;
        params.rounds = 20;
        params.max_depth = 2;
        params.min_samples_leaf = 1;
        params.learning_rate = 0.3;
        const GbdtModel model = fit(x, y, Objective::multiclass, params);
        int hits = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const std::vector<double> probs = predict_raw(model, x[i]);
            const int cls = probs[0] >= probs[1] ? 1 : 2;
            if (cls == static_cast<int>(y[i])) ++hits;
        }
        c.require(hits == 200, "separable task accuracy below 1.0 at 20 rounds");
    }

    // XOR with depth-2 trees (sampled checkerboard).
    {
        Rng rng(7002);
        Matrix x;
        std::vector<double> y;
        for (int i = 0; i < 160; ++i) {
            const int a = rng.uniform_int(0, 1);
            const int b = rng.uniform_int(0, 1);
            x.push_back({static_cast<double>(a), static_cast<double>(b)});
            y.push_back(((a ^ b) != 0) ? 2.0 : 1.0);
        }
        GbdtParams params;
        params.rounds = 30;
        params.max_depth = 2;
        params.min_samples_leaf = 1;
        params.learning_rate = 0.3;
        const GbdtModel model = fit(x, y, Objective::multiclass, params);
        int hits = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const std::vector<double> probs = predict_raw(model, x[i]);
            const int cls = probs[0] >= probs[1] ? 1 : 2;
            if (cls == static_cast<int>(y[i])) ++hits;
        }
        c.require(hits == static_cast<int>(x.size()), "xor task accuracy below 1.0");
    }

    // Non-increasing training loss on 10 fuzzed datasets.
    {
        Rng rng(7003);
        for (int dataset = 0; dataset < 10; ++dataset) {
            Matrix x;
            std::vector<double> y_reg, y_cls;
            const int rows = 50 + rng.uniform_int(0, 80);
            for (int i = 0; i < rows; ++i) {
                x.push_back({rng.normal(), rng.normal(), rng.normal()});
                y_reg.push_back(x.back()[0] - 2.0 * x.back()[2] + 0.5 * rng.normal());
                y_cls.push_back(1.0 + rng.uniform_int(0, 4));
            }
            GbdtParams params;
            params.rounds = 40;
            params.min_samples_leaf = 2;
            const GbdtModel reg = fit(x, y_reg, Objective::regression, params);
            for (std::size_t r = 1; r < reg.training_loss.size(); ++r) {
                c.require(reg.training_loss[r] <= reg.training_loss[r - 1] + 1e-12,
                          "regression loss increased at round " + std::to_string(r));
            }
            const GbdtModel cls = fit(x, y_cls, Objective::multiclass, params, {}, 5);
            for (std::size_t r = 1; r < cls.training_loss.size(); ++r) {
                c.require(cls.training_loss[r] <= cls.training_loss[r - 1] + 1e-12,
                          "multiclass loss increased at round " + std::to_string(r));
            }
        }
    }

    // Bit-exact predictions across a JSON round trip.
    {
        Rng rng(7004);
        Matrix x;
        std::vector<double> y;
        for (int i = 0; i < 120; ++i) {
            x.push_back({rng.normal(), rng.normal(), rng.normal(), rng.normal()});
            y.push_back(1.0 + rng.uniform_int(0, 4));
        }
        GbdtParams params;
        params.rounds = 15;
        params.min_samples_leaf = 2;
        const GbdtModel model = fit(x, y, Objective::multiclass, params, {}, 5);
        const GbdtModel reloaded =
            model_from_json(nlohmann::json::parse(model_to_json(model).dump()));
        for (int probe = 0; probe < 200; ++probe) {
            std::vector<double> v{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
            c.require(predict_raw(model, v) == predict_raw(reloaded, v),
                      "round-trip prediction differs");
        }
    }
    return c;
}

// ---------------------------------------------------------------- criterion 4

Criterion feature_invariants() {
    Criterion c;
    const double shift = 37.5;
    const double scale = 3.25;
    const double tol = 1e-8;
    const auto& names = feature_names();

    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        const TimeSeries series = test::random_series(seed);
        const FeatureVector base = extract_features(series);

        // Bounds.
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            c.require(std::isfinite(base.values[i]),
                      "seed " + std::to_string(seed) + ": non-finite " + names[i]);
        }
        for (const char* name : {"trend", "seasonal_strength", "entropy"}) {
            const double v = base.at(name);
            c.require(v >= 0.0 && v <= 1.0,
                      "seed " + std::to_string(seed) + ": " + name + " out of [0,1]");
        }
        for (const char* name : {"e_acf1", "x_acf1", "diff1_acf1", "diff2_acf1", "seas_acf1"}) {
            const double v = base.at(name);
            c.require(v >= -1.0 - 1e-12 && v <= 1.0 + 1e-12,
                      "seed " + std::to_string(seed) + ": " + name + " out of [-1,1]");
        }
        for (const char* name : {"e_acf10", "x_acf10", "diff1_acf10", "diff2_acf10"}) {
            c.require(base.at(name) >= 0.0,
                      "seed " + std::to_string(seed) + ": " + name + " negative");
        }
        if (series.frequency == 1) {
            c.require(base.at("nperiods") == 0.0 && base.at("seasonal_period") == 1.0 &&
                          base.at("seasonal_strength") == 0.0 && base.at("peak") == 0.0 &&
                          base.at("trough") == 0.0 &&
                          base.at("seas_acf1") == base.at("x_acf1"),
                      "seed " + std::to_string(seed) + ": frequency-1 conventions violated");
        }

        // Shift invariance of every feature.
        TimeSeries shifted = series;
        for (double& v : shifted.values) v += shift;
        const FeatureVector fs = extract_features(shifted);
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            const double reference = std::max(1.0, std::abs(base.values[i]));
            c.require(std::abs(fs.values[i] - base.values[i]) <= tol * reference,
                      "seed " + std::to_string(seed) + ": " + names[i] + " not shift-invariant");
        }

        // Scale laws: most features invariant; spike scales with the fourth
        // power, linearity/curvature linearly.
        TimeSeries rescaled = series;
        for (double& v : rescaled.values) v *= scale;
        const FeatureVector fr = extract_features(rescaled);
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            double expected = base.values[i];
            if (names[i] == "spike") {
                expected *= scale * scale * scale * scale;
            } else if (names[i] == "linearity" || names[i] == "curvature") {
                expected *= scale;
            }
            const double reference = std::max(1.0, std::abs(expected));
            c.require(std::abs(fr.values[i] - expected) <= tol * reference,
                      "seed " + std::to_string(seed) + ": " + names[i] + " scale law violated");
        }
    }
    if (c.pass) c.detail = "1000 seeded series";
    return c;
}

// ------------------------------------------------------- criteria 5 through 9

SyntheticSpec acceptance_corpus_spec() {
    SyntheticSpec spec;
    spec.count = 250;
    spec.min_length = 80;
    spec.max_length = 150;
    spec.break_probability = 0.8;
    spec.seed = 20240715;
    spec.pre.level = 50.0;
    spec.pre.ar = 0.95;
    spec.pre.noise_sd = 1.5;
    spec.post.level = 60.0;
    spec.post.ar = 0.1;
    spec.post.noise_sd = 1.5;
    return spec;
}

EvaluateOptions acceptance_options(int jobs) {
    EvaluateOptions options;
    options.config.m = 5;
    options.config.n = 4;
    options.config.h = 6;
    options.config.min_len = default_min_len(6, 1);
    options.base.kind = ForecasterKind::ses;
    options.train_fraction = 0.7;
    options.jobs = jobs;
    options.seed = 99;
    return options;
}

double mean_mase_of(const EvaluationResult& result, const std::string& method) {
    for (const auto& row : result.summary) {
        if (row.method == method && row.mean_mase) return *row.mean_mase;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

Criterion end_to_end_improvement(const EvaluationResult& result) {
    Criterion c;
    const double osp_mase = mean_mase_of(result, "average_cls");
    const double total_mase = mean_mase_of(result, "total_series");
    std::ostringstream detail;
    detail << "average_cls " << osp_mase << " vs total_series " << total_mase << " (ratio "
           << osp_mase / total_mase << ", need <= 0.95)";
    c.detail = detail.str();
    c.pass = std::isfinite(osp_mase) && std::isfinite(total_mase) &&
             osp_mase <= 0.95 * total_mase;
    return c;
}

Criterion combination_contract(const EvaluationResult& result,
                               const std::vector<TimeSeries>& corpus,
                               const EvaluateOptions& options) {
    Criterion c;

    // Exact averaging contract on real component forecasts.
    const std::vector<TimeSeries> head(corpus.begin(), corpus.begin() + 30);
    const TrainingSetBuild built =
        build_training_set(head, options.config, options.base, options.label_scale, 4);
    GbdtParams params = options.gbdt;
    params.rounds = 30;
    std::vector<OspForecastResult> results;
    for (const OspMethod& method :
         {OspMethod{LabelKind::average, ModelKind::classification},
          OspMethod{LabelKind::average, ModelKind::regression}}) {
        const GbdtModel model = train_osp(built.examples, method, params);
        results.push_back(
            osp_forecast(corpus.back(), model, options.config, options.base, method));
    }
    for (const auto& r : results) {
        for (std::size_t t = 0; t < r.final_forecast.values.size(); ++t) {
            double sum = 0.0;
            for (const auto& fc : r.component_forecasts) sum += fc.values[t];
            const double mean = sum / static_cast<double>(r.component_forecasts.size());
            c.require(r.final_forecast.values[t] == mean,
                      "component average differs from the final forecast");
        }
    }
    const Forecast combined = combine(results, CombineMode::all);
    for (std::size_t t = 0; t < combined.values.size(); ++t) {
        const double mean = (results[0].final_forecast.values[t] +
                             results[1].final_forecast.values[t]) /
                            2.0;
        c.require(combined.values[t] == mean, "combined forecast is not the exact mean");
    }

    const double combined_mase = mean_mase_of(result, "combined");
    const double total_mase = mean_mase_of(result, "total_series");
    if (c.pass) {
        std::ostringstream detail;
        detail << "combined " << combined_mase << " vs total_series " << total_mase;
        c.detail = detail.str();
    }
    c.require(std::isfinite(combined_mase) && combined_mase <= total_mase,
              "combined mean MASE above the total-series baseline");
    return c;
}

Criterion baseline_ordering(const EvaluationResult& result) {
    Criterion c;
    const double osp_mase = mean_mase_of(result, "average_cls");
    const double random_mase = mean_mase_of(result, "random");
    std::ostringstream detail;
    detail << "average_cls " << osp_mase << " vs random " << random_mase;
    c.detail = detail.str();
    c.pass = std::isfinite(osp_mase) && std::isfinite(random_mase) &&
             osp_mase <= random_mase + 0.01;
    return c;
}

Criterion changepoint_baseline(const EvaluationResult& result) {
    Criterion c;

    // Detection accuracy on seeded mean shifts.
    int detected = 0;
    for (int seed = 0; seed < 100; ++seed) {
        Rng rng(90000 + seed);
        TimeSeries series;
        series.id = "shift";
        for (int i = 0; i < 200; ++i) {
            series.values.push_back((i < 100 ? 0.0 : 5.0) + rng.normal());
        }
        const std::optional<int> change = cusum_changepoint(series);
        if (change && std::abs(*change - 100) <= 10) ++detected;
    }
    c.require(detected >= 90, "mean-shift detection rate " + std::to_string(detected) + "/100");

    // False positives on stationary noise.
    int alarms = 0;
    for (int seed = 0; seed < 100; ++seed) {
        const TimeSeries noise = test::white_noise(200, 91000 + seed);
        if (cusum_changepoint(noise)) ++alarms;
    }
    c.require(alarms <= 10, "false positives " + std::to_string(alarms) + "/100");

    const double osp_mase = mean_mase_of(result, "average_cls");
    const double change_mase = mean_mase_of(result, "changepoint");
    if (c.pass) {
        std::ostringstream detail;
        detail << "detect " << detected << "/100, alarms " << alarms << "/100, average_cls "
               << osp_mase << " vs changepoint " << change_mase;
        c.detail = detail.str();
    }
    c.require(std::isfinite(osp_mase) && osp_mase <= change_mase,
              "OSP mean MASE above the change-point baseline");
    return c;
}

std::string evaluation_bytes(const std::vector<TimeSeries>& corpus, int jobs) {
    const EvaluationResult result = run_evaluation(corpus, acceptance_options(jobs));
    std::ostringstream rows, summary;
    write_results_csv(rows, result.rows);
    write_summary_csv(summary, result.summary);
    return rows.str() + "\n===\n" + summary.str();
}

Criterion determinism(const std::vector<TimeSeries>& corpus) {
    Criterion c;
    const std::string serial = evaluation_bytes(corpus, 1);
    const std::string parallel = evaluation_bytes(corpus, 8);
    c.require(serial == parallel, "jobs=1 and jobs=8 outputs differ");
    if (c.pass) c.detail = "byte-identical CSVs for jobs=1 and jobs=8";
    return c;
}

int run_all() {
    const std::vector<TimeSeries> corpus = generate_synthetic(acceptance_corpus_spec());
    const EvaluationResult evaluation = run_evaluation(corpus, acceptance_options(8));
    const EvaluateOptions options = acceptance_options(8);

    const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria = {
        {"1 metric exactness", metric_exactness},
        {"2 labeling oracle equivalence", labeling_oracle_equivalence},
        {"3 gbdt sanity", gbdt_sanity},
        {"4 feature invariants", feature_invariants},
        {"5 end-to-end improvement", [&] { return end_to_end_improvement(evaluation); }},
        {"6 combination contract",
         [&] { return combination_contract(evaluation, corpus, options); }},
        {"7 baseline ordering", [&] { return baseline_ordering(evaluation); }},
        {"8 change-point baseline", [&] { return changepoint_baseline(evaluation); }},
        {"9 determinism", [&] { return determinism(corpus); }},
    };

    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Criterion result;
        try {
            result = fn();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %-31s %s  (%.1fs)%s%s\n", name.c_str(),
                    result.pass ? "PASS" : "FAIL", elapsed, result.detail.empty() ? "" : "  ",
                    result.detail.c_str());
        if (!result.pass) ++failures;
    }
    return failures;
}

} // namespace

int main() {
    const int failures = run_all();
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
