#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "osp/series.hpp"

namespace osp {

inline constexpr std::size_t kFeatureCount = 21;

/// Frozen feature order. Training and inference both key on this order; model
/// files store it and refuse to load on mismatch.
const std::array<std::string, kFeatureCount>& feature_names();

/// Fixed-order numeric feature vector describing one series.
struct FeatureVector {
    std::array<double, kFeatureCount> values{};

    double operator[](std::size_t i) const { return values[i]; }
    double at(std::string_view name) const;  // throws RangeError on unknown name
};

/// Additive decomposition: trend + seasonal + remainder == values, elementwise.
struct Decomposition {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> remainder;
};

/// Sample autocorrelation at `lag`; 0 for zero-variance input.
double acf(std::span<const double> values, int lag);

/// Sum of squared autocorrelations at lags 1..10. Requires length > 10.
double acf10(std::span<const double> values);

/// Classical moving-average decomposition. Seasonal data (frequency > 1) uses
/// a centered window of one cycle (2xf weights when f is even) and per-phase
/// means of the detrended series recentered to sum to zero over a cycle;
/// frequency-1 data uses a centered window of max(3, round(T/10)) forced odd
/// with seasonal identically zero. Trend endpoints are filled by linear
/// extrapolation of the nearest fitted segment.
Decomposition decompose(const TimeSeries& series);

/// max(0, 1 - Var(remainder) / Var(trend + remainder)); 0 when the
/// denominator vanishes.
double trend_strength(const Decomposition& d);

/// max(0, 1 - Var(remainder) / Var(seasonal + remainder)); 0 for
/// non-seasonal series.
double seasonal_strength(const Decomposition& d);

/// Variance of the leave-one-out variances of the remainder.
double spike(const Decomposition& d);

/// (beta1, beta2) of the trend regressed on orthonormalized {1, t', t'^2}
/// with t' standardized time.
std::pair<double, double> linearity_curvature(const Decomposition& d);

/// Shannon entropy of the normalized periodogram, scaled to [0, 1];
/// 0 for zero-variance series.
double spectral_entropy(const TimeSeries& series);

/// (acf1, acf10) of the decomposition remainder.
std::pair<double, double> residual_acf_features(const TimeSeries& series);

/// 1-based phase of the per-phase seasonal maximum and minimum (earliest
/// phase on ties); (0, 0) for frequency 1.
std::pair<double, double> peak_trough(const Decomposition& d, int frequency);

/// Shortest series extract_features accepts for the given frequency.
int min_feature_length(int frequency);

/// All features in the frozen order. Throws TooShortError below
/// min_feature_length.
FeatureVector extract_features(const TimeSeries& series);

/// CSV header "series_id,<feature names...>" and one data row.
std::string features_csv_header();
std::string features_csv_row(const std::string& series_id, const FeatureVector& fv);

} // namespace osp
