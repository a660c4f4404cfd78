#include "osp/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "format_util.hpp"
#include "osp/errors.hpp"

namespace osp {

namespace {

constexpr double kPi = 3.14159265358979323846;

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Population variance.
double variance_of(std::span<const double> v) {
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / static_cast<double>(v.size());
}

// Centered moving average with linear extrapolation of the nearest fitted
// segment at both ends. Even windows use the standard 2xw scheme (half weight
// on the outermost points).
std::vector<double> moving_average_trend(const std::vector<double>& y, int window) {
    const int t = static_cast<int>(y.size());
    std::vector<double> trend(y.size(), 0.0);
    int lo, hi;  // first and last index with a fitted value
    if (window % 2 == 1) {
        const int half = (window - 1) / 2;
        lo = half;
        hi = t - 1 - half;
        for (int i = lo; i <= hi; ++i) {
            double s = 0.0;
            for (int k = -half; k <= half; ++k) s += y[static_cast<std::size_t>(i + k)];
            trend[static_cast<std::size_t>(i)] = s / window;
        }
    } else {
        const int half = window / 2;
        lo = half;
        hi = t - 1 - half;
        for (int i = lo; i <= hi; ++i) {
            double s = 0.5 * (y[static_cast<std::size_t>(i - half)] +
                              y[static_cast<std::size_t>(i + half)]);
            for (int k = -half + 1; k <= half - 1; ++k) s += y[static_cast<std::size_t>(i + k)];
            trend[static_cast<std::size_t>(i)] = s / window;
        }
    }
    const double left_slope = (hi > lo) ? trend[lo + 1] - trend[lo] : 0.0;
    for (int i = lo - 1; i >= 0; --i) trend[i] = trend[lo] - left_slope * (lo - i);
    const double right_slope = (hi > lo) ? trend[hi] - trend[hi - 1] : 0.0;
    for (int i = hi + 1; i < t; ++i) trend[i] = trend[hi] + right_slope * (i - hi);
    return trend;
}


} // namespace

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = {
        "length",       "frequency",  "nperiods",          "seasonal_period",
        "trend",        "spike",      "linearity",         "curvature",
        "e_acf1",       "e_acf10",    "seasonal_strength", "peak",
        "trough",       "entropy",    "x_acf1",            "x_acf10",
        "diff1_acf1",   "diff1_acf10", "diff2_acf1",       "diff2_acf10",
        "seas_acf1",
    };
    return names;
}

double FeatureVector::at(std::string_view name) const {
    const auto& names = feature_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return values[i];
    }
    throw RangeError("unknown feature name: " + std::string(name));
}

double acf(std::span<const double> values, int lag) {
    if (lag < 1) throw InvalidSpecError("acf: lag must be >= 1");
    const int t = static_cast<int>(values.size());
    if (t <= lag) throw TooShortError("acf: need length > lag");
    const double m = mean_of(values);
    double denom = 0.0;
    for (double v : values) denom += (v - m) * (v - m);
    if (denom <= 0.0) return 0.0;
    double num = 0.0;
    for (int i = lag; i < t; ++i) num += (values[i] - m) * (values[i - lag] - m);
    return num / denom;
}

double acf10(std::span<const double> values) {
    if (values.size() <= 10) throw TooShortError("acf10: need length > 10");
    double sum = 0.0;
    for (int lag = 1; lag <= 10; ++lag) {
        const double r = acf(values, lag);
        sum += r * r;
    }
    return sum;
}

Decomposition decompose(const TimeSeries& series) {
    const int t = series.length();
    const int f = series.frequency;
    Decomposition d;
    d.seasonal.assign(series.values.size(), 0.0);
    if (f > 1) {
        if (t < 2 * f) throw TooShortError("decompose: need length >= 2*frequency");
        d.trend = moving_average_trend(series.values, f);
        // Per-phase means of the detrended series, recentered over one cycle.
        std::vector<double> phase_sum(static_cast<std::size_t>(f), 0.0);
        std::vector<int> phase_count(static_cast<std::size_t>(f), 0);
        for (int i = 0; i < t; ++i) {
            phase_sum[i % f] += series.values[i] - d.trend[i];
            ++phase_count[i % f];
        }
        std::vector<double> phase_mean(static_cast<std::size_t>(f));
        double total = 0.0;
        for (int p = 0; p < f; ++p) {
            phase_mean[p] = phase_sum[p] / phase_count[p];
            total += phase_mean[p];
        }
        const double center = total / f;
        for (int p = 0; p < f; ++p) phase_mean[p] -= center;
        for (int i = 0; i < t; ++i) d.seasonal[i] = phase_mean[i % f];
    } else {
        if (t < 5) throw TooShortError("decompose: need length >= 5 for frequency 1");
        int window = std::max(3, static_cast<int>(std::lround(t / 10.0)));
        if (window % 2 == 0) ++window;
        d.trend = moving_average_trend(series.values, window);
    }
    d.remainder.resize(series.values.size());
    for (int i = 0; i < t; ++i) d.remainder[i] = series.values[i] - d.trend[i] - d.seasonal[i];
    return d;
}

namespace {

double strength_of(const std::vector<double>& component, const std::vector<double>& remainder) {
    std::vector<double> combined(component.size());
    for (std::size_t i = 0; i < component.size(); ++i) combined[i] = component[i] + remainder[i];
    const double var_combined = variance_of(combined);
    if (var_combined <= 0.0) return 0.0;
    return std::max(0.0, 1.0 - variance_of(remainder) / var_combined);
}

} // namespace

double trend_strength(const Decomposition& d) { return strength_of(d.trend, d.remainder); }

double seasonal_strength(const Decomposition& d) { return strength_of(d.seasonal, d.remainder); }

double spike(const Decomposition& d) {
    const auto& r = d.remainder;
    const int t = static_cast<int>(r.size());
    if (t < 3) throw TooShortError("spike: remainder needs length >= 3");
    // Center first so the sufficient statistics stay well conditioned.
    const double m = mean_of(r);
    double s = 0.0, q = 0.0;
    for (double x : r) {
        const double c = x - m;
        s += c;
        q += c * c;
    }
    std::vector<double> loo(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) {
        const double c = r[i] - m;
        const double mean_i = (s - c) / (t - 1);
        loo[i] = (q - c * c) / (t - 1) - mean_i * mean_i;
    }
    return variance_of(loo);
}

std::pair<double, double> linearity_curvature(const Decomposition& d) {
    const auto& y = d.trend;
    const int t = static_cast<int>(y.size());
    if (t < 3) throw TooShortError("linearity_curvature: trend needs length >= 3");
    // Standardized time (sample sd), then Gram-Schmidt on {1, t', t'^2}.
    std::vector<double> tt(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) tt[i] = static_cast<double>(i);
    const double tm = mean_of(tt);
    double sd = 0.0;
    for (double v : tt) sd += (v - tm) * (v - tm);
    sd = std::sqrt(sd / (t - 1));
    for (double& v : tt) v = (v - tm) / sd;

    std::array<std::vector<double>, 3> basis;
    basis[0].assign(static_cast<std::size_t>(t), 1.0);
    basis[1] = tt;
    basis[2].resize(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) basis[2][i] = tt[i] * tt[i];

    auto dot = [t](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (int i = 0; i < t; ++i) acc += a[i] * b[i];
        return acc;
    };
    for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < k; ++j) {
            const double proj = dot(basis[k], basis[j]);
            for (int i = 0; i < t; ++i) basis[k][i] -= proj * basis[j][i];
        }
        const double norm = std::sqrt(dot(basis[k], basis[k]));
        if (norm > 0.0) {
            for (int i = 0; i < t; ++i) basis[k][i] /= norm;
        }
    }
    std::vector<double> yv(y.begin(), y.end());
    return {dot(yv, basis[1]), dot(yv, basis[2])};
}

double spectral_entropy(const TimeSeries& series) {
    const int t = series.length();
    if (t < 8) throw TooShortError("spectral_entropy: need length >= 8");
    const double m = mean_of(series.values);
    const int k_max = t / 2;
    std::vector<double> power(static_cast<std::size_t>(k_max));
    double total = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        double re = 0.0, im = 0.0;
        const double w = 2.0 * kPi * k / t;
        for (int i = 0; i < t; ++i) {
            const double c = series.values[i] - m;
            re += c * std::cos(w * i);
            im -= c * std::sin(w * i);
        }
        power[k - 1] = (re * re + im * im) / t;
        total += power[k - 1];
    }
    if (total <= 0.0) return 0.0;
    double entropy = 0.0;
    for (double p : power) {
        const double prob = p / total;
        if (prob > 0.0) entropy -= prob * std::log(prob);
    }
    return entropy / std::log(static_cast<double>(k_max));
}

std::pair<double, double> residual_acf_features(const TimeSeries& series) {
    const Decomposition d = decompose(series);
    return {acf(d.remainder, 1), acf10(d.remainder)};
}

std::pair<double, double> peak_trough(const Decomposition& d, int frequency) {
    if (frequency <= 1) return {0.0, 0.0};
    std::vector<double> phase_sum(static_cast<std::size_t>(frequency), 0.0);
    std::vector<int> phase_count(static_cast<std::size_t>(frequency), 0);
    for (std::size_t i = 0; i < d.seasonal.size(); ++i) {
        phase_sum[i % frequency] += d.seasonal[i];
        ++phase_count[i % frequency];
    }
    int peak = 0, trough = 0;
    double best_max = -std::numeric_limits<double>::infinity();
    double best_min = std::numeric_limits<double>::infinity();
    for (int p = 0; p < frequency; ++p) {
        const double v = phase_sum[p] / phase_count[p];
        if (v > best_max) {
            best_max = v;
            peak = p;
        }
        if (v < best_min) {
            best_min = v;
            trough = p;
        }
    }
    return {static_cast<double>(peak + 1), static_cast<double>(trough + 1)};
}

int min_feature_length(int frequency) { return std::max(13, 2 * frequency + 1); }

FeatureVector extract_features(const TimeSeries& series) {
    const int t = series.length();
    const int f = series.frequency;
    if (t < min_feature_length(f)) {
        throw TooShortError("extract_features: series '" + series.id + "' too short (length " +
                            std::to_string(t) + ", need " +
                            std::to_string(min_feature_length(f)) + ")");
    }
    const Decomposition d = decompose(series);
    const auto [linearity, curvature] = linearity_curvature(d);
    const auto [pk, tr] = peak_trough(d, f);
    const TimeSeries d1 = difference(series, 1, 1);
    const TimeSeries d2 = difference(series, 1, 2);
    const double x_acf1 = acf(series.values, 1);

    FeatureVector fv;
    fv.values = {
        static_cast<double>(t),
        static_cast<double>(f),
        f > 1 ? 1.0 : 0.0,
        static_cast<double>(f),
        trend_strength(d),
        spike(d),
        linearity,
        curvature,
        acf(d.remainder, 1),
        acf10(d.remainder),
        f > 1 ? seasonal_strength(d) : 0.0,
        pk,
        tr,
        spectral_entropy(series),
        x_acf1,
        acf10(series.values),
        acf(d1.values, 1),
        acf10(d1.values),
        acf(d2.values, 1),
        acf10(d2.values),
        f > 1 ? acf(series.values, f) : x_acf1,
    };
    return fv;
}

std::string features_csv_header() {
    std::string header = "series_id";
    for (const auto& name : feature_names()) {
        header += ',';
        header += name;
    }
    return header;
}

std::string features_csv_row(const std::string& series_id, const FeatureVector& fv) {
    std::string row = series_id;
    for (double v : fv.values) {
        row += ',';
        row += detail::format_double(v);
    }
    return row;
}

} // namespace osp
