#include "osp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "osp/errors.hpp"
#include "osp/rng.hpp"

namespace osp {

std::string method_name(const OspMethod& method) {
    std::string name = method.label_kind == LabelKind::actual ? "actual" : "average";
    name += method.model_kind == ModelKind::classification ? "_cls" : "_reg";
    return name;
}

GbdtModel train_osp(const std::vector<LabeledExample>& training_set, const OspMethod& method,
                    const GbdtParams& params) {
    if (training_set.empty()) throw EmptyTrainingSetError("train_osp: empty training set");
    const int m = static_cast<int>(training_set.front().error_matrix.size());
    Matrix x;
    std::vector<double> y;
    x.reserve(training_set.size());
    y.reserve(training_set.size());
    for (const auto& ex : training_set) {
        x.emplace_back(ex.features.values.begin(), ex.features.values.end());
        const IntervalLabel& label =
            method.label_kind == LabelKind::actual ? ex.label_actual : ex.label_average;
        y.push_back(static_cast<double>(label.interval));
    }
    std::vector<std::string> names(feature_names().begin(), feature_names().end());
    if (method.model_kind == ModelKind::classification) {
        return fit(x, y, Objective::multiclass, params, std::move(names), m);
    }
    return fit(x, y, Objective::regression, params, std::move(names));
}

IntervalLabel predict_interval(const GbdtModel& model, const FeatureVector& features, int m) {
    if (model.feature_names.size() != kFeatureCount ||
        !std::equal(model.feature_names.begin(), model.feature_names.end(),
                    feature_names().begin())) {
        throw InvalidSpecError("predict_interval: model feature order mismatch");
    }
    const std::vector<double> raw = predict_raw(model, features.values);
    IntervalLabel label;
    if (model.objective == Objective::multiclass) {
        if (model.num_class != m) {
            throw InvalidSpecError("predict_interval: model classes != m");
        }
        int best = 0;
        for (int c = 1; c < model.num_class; ++c) {
            if (raw[static_cast<std::size_t>(c)] > raw[static_cast<std::size_t>(best)]) best = c;
        }
        label.interval = best + 1;
    } else {
        // Round half away from zero, then clamp to [1, m].
        const double rounded = std::round(raw[0]);
        label.interval = static_cast<int>(std::clamp(rounded, 1.0, static_cast<double>(m)));
    }
    return label;
}

namespace {

// Candidate starting points of one interval of a length-T series, using the
// labeling geometry; the average is taken over survivors of the min_len cut.
std::vector<int> interval_candidates(int length, const SegmentationConfig& config, int interval) {
    const CandidateGrid grid = build_grid(length, config);
    return grid.starts[static_cast<std::size_t>(interval - 1)];
}

Forecast average_forecasts(const std::vector<Forecast>& components) {
    Forecast final_fc;
    final_fc.model_name = components.front().model_name;
    final_fc.origin_length = components.front().origin_length;
    const std::size_t h = components.front().values.size();
    final_fc.values.assign(h, 0.0);
    // Sum in index order, then divide: the averaging contract is exact.
    for (const auto& fc : components) {
        for (std::size_t i = 0; i < h; ++i) final_fc.values[i] += fc.values[i];
    }
    for (double& v : final_fc.values) v /= static_cast<double>(components.size());
    return final_fc;
}

Forecast forecast_from_interval(const TimeSeries& series, const SegmentationConfig& config,
                                const ForecasterSpec& spec, int interval,
                                std::vector<Forecast>* components_out) {
    const std::vector<int> candidates = interval_candidates(series.length(), config, interval);
    std::vector<Forecast> components;
    components.reserve(candidates.size());
    std::string last_error = "no candidates";
    for (int start : candidates) {
        try {
            components.push_back(forecast(spec, truncate_from(series, start), config.h));
        } catch (const Error& e) {
            last_error = e.what();
        }
    }
    if (components.empty()) {
        throw ForecastError("series '" + series.id + "': every candidate forecast failed (" +
                            last_error + ")");
    }
    Forecast final_fc = average_forecasts(components);
    if (components_out) *components_out = std::move(components);
    return final_fc;
}

} // namespace

OspForecastResult osp_forecast(const TimeSeries& series, const GbdtModel& model,
                               const SegmentationConfig& config, const ForecasterSpec& spec,
                               const OspMethod& method) {
    if ((method.model_kind == ModelKind::classification) !=
        (model.objective == Objective::multiclass)) {
        throw InvalidSpecError("osp_forecast: model objective does not match method");
    }
    OspForecastResult result;
    result.series_id = series.id;
    result.method = method;
    const FeatureVector features = extract_features(series);
    result.predicted_interval = predict_interval(model, features, config.m);
    result.final_forecast = forecast_from_interval(series, config, spec,
                                                   result.predicted_interval.interval,
                                                   &result.component_forecasts);
    return result;
}

Forecast combine(const std::vector<OspForecastResult>& results, CombineMode mode) {
    std::vector<Forecast> selected;
    for (const auto& r : results) {
        const bool is_cls = r.method.model_kind == ModelKind::classification;
        if (mode == CombineMode::all || (mode == CombineMode::classification_only && is_cls) ||
            (mode == CombineMode::regression_only && !is_cls)) {
            selected.push_back(r.final_forecast);
        }
    }
    if (selected.empty()) throw InvalidSpecError("combine: nothing selected");
    const std::size_t h = selected.front().values.size();
    for (const auto& fc : selected) {
        if (fc.values.size() != h) throw InvalidSpecError("combine: horizon mismatch");
    }
    Forecast out = average_forecasts(selected);
    out.model_name = "combined";
    return out;
}

Forecast random_start_forecast(const TimeSeries& series, const SegmentationConfig& config,
                               const ForecasterSpec& spec, std::uint64_t seed) {
    const int interval = 1 + static_cast<int>(SplitMix64(seed).next() %
                                              static_cast<std::uint64_t>(config.m));
    return forecast_from_interval(series, config, spec, interval, nullptr);
}

std::optional<int> cusum_changepoint(const TimeSeries& series, double threshold) {
    const int t = series.length();
    if (t < 10) return std::nullopt;
    double mean = 0.0;
    for (double v : series.values) mean += v;
    mean /= t;
    double var = 0.0;
    for (double v : series.values) var += (v - mean) * (v - mean);
    var /= t;
    if (var <= 0.0) return std::nullopt;
    const double sd = std::sqrt(var);

    // Max |cumulative sum| of the standardized series; S_T is 0 by
    // construction, so the scan over k < T-1 covers every candidate.
    double cumulative = 0.0;
    double best_stat = -1.0;
    int best_index = 0;
    for (int k = 0; k + 1 < t; ++k) {
        cumulative += (series.values[static_cast<std::size_t>(k)] - mean) / sd;
        const double stat = std::abs(cumulative);
        if (stat > best_stat) {
            best_stat = stat;
            best_index = k;
        }
    }
    if (best_stat / std::sqrt(static_cast<double>(t)) <= threshold) return std::nullopt;
    return best_index;
}

Forecast changepoint_forecast(const TimeSeries& series, const ForecasterSpec& spec, int h) {
    const std::optional<int> change = cusum_changepoint(series);
    if (change) {
        const int min_len = default_min_len(h, series.frequency);
        if (series.length() - *change >= min_len) {
            return forecast(spec, truncate_from(series, *change), h);
        }
    }
    return forecast(spec, series, h);
}

} // namespace osp
