#pragma once

#include <optional>
#include <string>
#include <vector>

#include "osp/series.hpp"

namespace osp {

enum class ForecasterKind {
    naive,
    snaive,
    ses,
    holt,
    holt_winters_add,
    ets_auto,
    theta,
};

const char* to_string(ForecasterKind kind);
ForecasterKind forecaster_kind_from_string(const std::string& name);

/// Base forecasting model selection. The optional smoothing constants pin the
/// corresponding parameter instead of grid-searching it (used by tests).
struct ForecasterSpec {
    ForecasterKind kind = ForecasterKind::ses;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> gamma;
};

/// h-step point forecast.
struct Forecast {
    std::vector<double> values;
    std::string model_name;
    int origin_length = 0;  // length of the series forecast from

    int horizon() const { return static_cast<int>(values.size()); }
};

/// One-step fitted values aligned with the observations, and their residuals.
struct FitResult {
    std::vector<double> fitted;
    std::vector<double> residuals;
};

/// Shortest series the model can be fit on.
int min_length(ForecasterKind kind, int frequency);

/// Deterministic h-step forecast. Throws TooShortError below min_length and
/// InvalidSpecError for a seasonal model on frequency-1 data.
Forecast forecast(const ForecasterSpec& spec, const TimeSeries& series, int h);

/// In-sample one-step fit under the same parameter choices forecast() makes.
FitResult in_sample_fit(const ForecasterSpec& spec, const TimeSeries& series);

} // namespace osp
