#include "osp/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "osp/errors.hpp"

namespace osp {

void TimeSeries::validate() const {
    if (values.empty()) throw InvalidSpecError("series '" + id + "': empty");
    if (frequency < 1) throw InvalidSpecError("series '" + id + "': frequency must be >= 1");
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidSpecError("series '" + id + "': non-finite value");
    }
}

void SegmentationConfig::validate(int frequency) const {
    if (m < 2) throw InvalidSpecError("segmentation: m must be >= 2");
    if (n < 1) throw InvalidSpecError("segmentation: n must be >= 1");
    if (h < 1) throw InvalidSpecError("segmentation: h must be >= 1");
    if (min_len < 2) throw InvalidSpecError("segmentation: min_len must be >= 2");
    if (frequency > 1 && min_len < 2 * frequency) {
        throw InvalidSpecError("segmentation: min_len must be >= 2*frequency for seasonal data");
    }
}

int default_min_len(int h, int frequency) {
    return std::max({h + 2, 2 * frequency, 8});
}

TimeSeries truncate_from(const TimeSeries& series, int start) {
    const int t = series.length();
    if (start < 0 || start >= t) {
        throw RangeError("truncate_from: start " + std::to_string(start) +
                         " out of range for length " + std::to_string(t));
    }
    TimeSeries out;
    out.values.assign(series.values.begin() + start, series.values.end());
    out.frequency = series.frequency;
    out.id = series.id;
    return out;
}

TrainTestSplit split_holdout(const TimeSeries& series, int h) {
    const int t = series.length();
    if (h < 1) throw InvalidSpecError("split_holdout: h must be >= 1");
    if (t < h + 2) {
        throw TooShortError("split_holdout: need length >= h + 2, got " + std::to_string(t) +
                            " with h = " + std::to_string(h));
    }
    TrainTestSplit split;
    split.train.values.assign(series.values.begin(), series.values.end() - h);
    split.test.values.assign(series.values.end() - h, series.values.end());
    split.train.frequency = split.test.frequency = series.frequency;
    split.train.id = split.test.id = series.id;
    return split;
}

TimeSeries difference(const TimeSeries& series, int lag, int order) {
    if (lag < 1 || order < 1) throw InvalidSpecError("difference: lag and order must be >= 1");
    if (series.length() <= lag * order) {
        throw TooShortError("difference: need length > lag*order");
    }
    std::vector<double> cur = series.values;
    for (int o = 0; o < order; ++o) {
        std::vector<double> next(cur.size() - static_cast<std::size_t>(lag));
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] = cur[i + static_cast<std::size_t>(lag)] - cur[i];
        }
        cur = std::move(next);
    }
    TimeSeries out;
    out.values = std::move(cur);
    out.frequency = series.frequency;
    out.id = series.id;
    return out;
}

} // namespace osp
