#include "osp/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <thread>

#include "format_util.hpp"
#include "osp/errors.hpp"
#include "osp/metrics.hpp"
#include "osp/rng.hpp"

namespace osp {

namespace {


const std::vector<OspMethod>& osp_methods() {
    static const std::vector<OspMethod> methods = {
        {LabelKind::actual, ModelKind::classification},
        {LabelKind::actual, ModelKind::regression},
        {LabelKind::average, ModelKind::classification},
        {LabelKind::average, ModelKind::regression},
    };
    return methods;
}

} // namespace

const std::vector<std::string>& evaluation_methods() {
    static const std::vector<std::string> methods = {
        "actual_cls", "actual_reg",  "average_cls", "average_reg",
        "combined",   "random",      "changepoint", "total_series",
    };
    return methods;
}

EvaluationResult run_evaluation(const std::vector<TimeSeries>& series_list,
                                const EvaluateOptions& options, std::ostream* diag) {
    if (series_list.empty()) throw EmptyTrainingSetError("evaluate: no input series");
    const SegmentationConfig& config = options.config;
    config.validate();

    EvaluationResult result;

    // Train the four method models unless pre-trained ones were supplied.
    std::map<std::string, GbdtModel> models;
    std::size_t eval_begin = 0;
    if (!options.pretrained.empty()) {
        models = options.pretrained;
    } else {
        const std::size_t n_train = std::min(
            series_list.size() - 1,
            static_cast<std::size_t>(std::ceil(options.train_fraction * series_list.size())));
        if (n_train == 0) throw EmptyTrainingSetError("evaluate: empty training split");
        eval_begin = n_train;
        const std::vector<TimeSeries> train_split(series_list.begin(),
                                                  series_list.begin() + n_train);
        const TrainingSetBuild built = build_training_set(train_split, config, options.base,
                                                          options.label_scale, options.jobs);
        for (const auto& [id, reason] : built.skipped) {
            result.skipped.emplace_back(id, reason);
            if (diag) *diag << "labeling skipped " << id << ": " << reason << '\n';
        }
        for (const OspMethod& method : osp_methods()) {
            models.emplace(method_name(method), train_osp(built.examples, method, options.gbdt));
        }
    }
    for (const OspMethod& method : osp_methods()) {
        if (!models.count(method_name(method))) {
            throw InvalidSpecError("evaluate: missing model for " + method_name(method));
        }
    }

    const std::vector<std::string>& methods = evaluation_methods();
    struct SeriesOutcome {
        std::vector<ResultRow> rows;
        std::optional<std::pair<std::string, std::string>> skip;
    };
    std::vector<SeriesOutcome> outcomes(series_list.size() - eval_begin);

    auto evaluate_one = [&](std::size_t slot) {
        const TimeSeries& series = series_list[eval_begin + slot];
        SeriesOutcome& outcome = outcomes[slot];
        TrainTestSplit split;
        try {
            series.validate();
            split = split_holdout(series, config.h);
            build_grid(split.train.length(), config);  // eligibility screen
            if (split.train.length() < min_feature_length(series.frequency)) {
                throw IneligibleSeriesError("training portion shorter than feature minimum");
            }
        } catch (const Error& e) {
            outcome.skip = {series.id, e.what()};
            return;
        }
        const TimeSeries& train = split.train;
        const std::vector<double>& holdout = split.test.values;

        std::vector<OspForecastResult> osp_results;
        auto score = [&](const std::string& method, const std::vector<double>* forecast_values) {
            ResultRow row;
            row.series_id = series.id;
            row.method = method;
            if (forecast_values) {
                // Reported MASE is scaled by the full pre-holdout series so
                // every method of a series shares one denominator.
                const ErrorReport report = evaluate(train.values, holdout, *forecast_values);
                row.mase = report.mase;
                row.mape = report.mape;
            }
            outcome.rows.push_back(std::move(row));
        };

        for (const std::string& method : methods) {
            try {
                if (method == "total_series") {
                    const Forecast fc = forecast(options.base, train, config.h);
                    score(method, &fc.values);
                } else if (method == "random") {
                    const Forecast fc = random_start_forecast(
                        train, config, options.base,
                        derive_seed(options.seed, eval_begin + slot));
                    score(method, &fc.values);
                } else if (method == "changepoint") {
                    const Forecast fc = changepoint_forecast(train, options.base, config.h);
                    score(method, &fc.values);
                } else if (method == "combined") {
                    const Forecast fc = combine(osp_results, CombineMode::all);
                    score(method, &fc.values);
                } else {
                    OspMethod osp_method;
                    osp_method.label_kind =
                        method.rfind("actual", 0) == 0 ? LabelKind::actual : LabelKind::average;
                    osp_method.model_kind = method.ends_with("_cls") ? ModelKind::classification
                                                                     : ModelKind::regression;
                    OspForecastResult r = osp_forecast(train, models.at(method), config,
                                                       options.base, osp_method);
                    score(method, &r.final_forecast.values);
                    osp_results.push_back(std::move(r));
                }
            } catch (const Error&) {
                score(method, nullptr);  // failure recorded as an empty row
            }
        }
    };

    const int workers =
        std::max(1, std::min<int>(options.jobs, static_cast<int>(outcomes.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < outcomes.size(); ++i) evaluate_one(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = static_cast<std::size_t>(w); i < outcomes.size();
                     i += static_cast<std::size_t>(workers)) {
                    evaluate_one(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    for (auto& outcome : outcomes) {
        if (outcome.skip) {
            result.skipped.push_back(*outcome.skip);
            if (diag) {
                *diag << "evaluation skipped " << outcome.skip->first << ": "
                      << outcome.skip->second << '\n';
            }
            continue;
        }
        for (auto& row : outcome.rows) result.rows.push_back(std::move(row));
    }
    if (result.rows.empty()) throw EmptyTrainingSetError("evaluate: no series could be evaluated");

    for (const std::string& method : methods) {
        SummaryRow summary;
        summary.method = method;
        double mase_sum = 0.0, mape_sum = 0.0;
        int mase_count = 0, mape_count = 0;
        for (const auto& row : result.rows) {
            if (row.method != method) continue;
            if (row.mase) {
                mase_sum += *row.mase;
                ++mase_count;
            }
            if (row.mape) {
                mape_sum += *row.mape;
                ++mape_count;
            }
        }
        summary.count = mase_count;
        if (mase_count > 0) summary.mean_mase = mase_sum / mase_count;
        if (mape_count > 0) summary.mean_mape = mape_sum / mape_count;
        result.summary.push_back(std::move(summary));
    }
    return result;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << "series_id,method,mase,mape\n";
    for (const auto& row : rows) {
        out << row.series_id << ',' << row.method << ',';
        if (row.mase) out << detail::format_double(*row.mase);
        out << ',';
        if (row.mape) out << detail::format_double(*row.mape);
        out << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
    out << "method,mean_mase,mean_mape,series_count\n";
    for (const auto& row : summary) {
        out << row.method << ',';
        if (row.mean_mase) out << detail::format_double(*row.mean_mase);
        out << ',';
        if (row.mean_mape) out << detail::format_double(*row.mean_mape);
        out << ',' << row.count << '\n';
    }
}

} // namespace osp
