#pragma once

#include <string>
#include <vector>

namespace osp {

/// Univariate time series: ordered real observations plus the number of
/// observations per seasonal cycle (1 yearly, 4 quarterly, 12 monthly, ...).
struct TimeSeries {
    std::vector<double> values;
    int frequency = 1;
    std::string id;

    int length() const { return static_cast<int>(values.size()); }

    /// Throws InvalidSpecError unless length >= 1, frequency >= 1 and all
    /// values are finite.
    void validate() const;
};

/// A series split into a training prefix and the h-observation holdout.
struct TrainTestSplit {
    TimeSeries train;
    TimeSeries test;
};

/// Geometry shared by labeling and prediction: m sub-intervals, n candidate
/// starting points per sub-interval, forecast horizon h, and the shortest
/// suffix any candidate may leave.
struct SegmentationConfig {
    int m = 5;
    int n = 4;
    int h = 6;
    int min_len = 8;

    /// Pipeline-boundary validation: m >= 2, n >= 1, h >= 1, min_len >= 2
    /// (and min_len >= 2*frequency for seasonal data).
    void validate(int frequency = 1) const;
};

/// max(h + 2, 2*frequency, 8): every base forecaster stays fittable on every
/// candidate suffix.
int default_min_len(int h, int frequency);

/// Suffix starting at `start` (0-based); frequency and id preserved.
TimeSeries truncate_from(const TimeSeries& series, int start);

/// First T-h values vs. last h values. Requires T >= h + 2.
TrainTestSplit split_holdout(const TimeSeries& series, int h);

/// Repeated lagged differencing; output length T - lag*order.
TimeSeries difference(const TimeSeries& series, int lag, int order);

} // namespace osp
