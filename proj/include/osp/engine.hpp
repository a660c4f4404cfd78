#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "osp/forecasters.hpp"
#include "osp/gbdt.hpp"
#include "osp/labeler.hpp"
#include "osp/series.hpp"

namespace osp {

enum class LabelKind { actual, average };
enum class ModelKind { classification, regression };

/// One of the four method combinations: which marking method supplied the
/// labels and which objective the learner was trained under.
struct OspMethod {
    LabelKind label_kind = LabelKind::average;
    ModelKind model_kind = ModelKind::classification;
};

/// "actual_cls", "actual_reg", "average_cls" or "average_reg".
std::string method_name(const OspMethod& method);

/// Trains the starting-interval model on a labeled set.
GbdtModel train_osp(const std::vector<LabeledExample>& training_set, const OspMethod& method,
                    const GbdtParams& params);

/// Classification: argmax class probability (ties to the lower interval).
/// Regression: round half away from zero, then clamp to [1, m].
IntervalLabel predict_interval(const GbdtModel& model, const FeatureVector& features, int m);

struct OspForecastResult {
    std::string series_id;
    IntervalLabel predicted_interval;
    std::vector<Forecast> component_forecasts;
    Forecast final_forecast;  // elementwise mean of the components
    OspMethod method;
};

/// Predicts the starting interval from the full available series, forecasts
/// from the interval's candidate starting points and averages the results.
OspForecastResult osp_forecast(const TimeSeries& series, const GbdtModel& model,
                               const SegmentationConfig& config, const ForecasterSpec& spec,
                               const OspMethod& method);

enum class CombineMode { all, classification_only, regression_only };

/// Elementwise mean of the selected final forecasts.
Forecast combine(const std::vector<OspForecastResult>& results, CombineMode mode);

/// Draws the starting interval uniformly from 1..m instead of predicting it.
Forecast random_start_forecast(const TimeSeries& series, const SegmentationConfig& config,
                               const ForecasterSpec& spec, std::uint64_t seed);

/// Maximum-|CUSUM| change-point test on the standardized series at the given
/// Brownian-bridge critical value (1.358 = 95%). nullopt when no change is
/// significant, the series is constant, or T < 10.
std::optional<int> cusum_changepoint(const TimeSeries& series, double threshold = 1.358);

/// Truncates at the detected change point (kept whole when none is found or
/// the suffix would be too short) and forecasts with the base model.
Forecast changepoint_forecast(const TimeSeries& series, const ForecasterSpec& spec, int h);

} // namespace osp
