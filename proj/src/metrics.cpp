#include "osp/metrics.hpp"

#include <cmath>
#include <cstdlib>

#include "osp/errors.hpp"

namespace osp {

namespace {

void check_lengths(std::span<const double> actual, std::span<const double> forecast) {
    if (actual.size() != forecast.size() || actual.empty()) {
        throw InvalidSpecError("metrics: actual and forecast must have equal nonzero length");
    }
}

} // namespace

double mase(std::span<const double> train, std::span<const double> actual,
            std::span<const double> forecast) {
    if (train.size() < 2) throw TooShortError("mase: scaling series needs length >= 2");
    check_lengths(actual, forecast);

    double scale = 0.0;
    for (std::size_t i = 1; i < train.size(); ++i) scale += std::abs(train[i] - train[i - 1]);
    scale /= static_cast<double>(train.size() - 1);
    if (scale <= 0.0) throw UndefinedMetricError("mase: constant scaling series");

    double err = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) err += std::abs(actual[i] - forecast[i]);
    return err / static_cast<double>(actual.size()) / scale;
}

double mape(std::span<const double> actual, std::span<const double> forecast) {
    check_lengths(actual, forecast);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) throw UndefinedMetricError("mape: zero actual value");
        sum += std::abs((forecast[i] - actual[i]) / actual[i]);
    }
    return 100.0 * sum / static_cast<double>(actual.size());
}

ErrorReport evaluate(std::span<const double> train, std::span<const double> actual,
                     std::span<const double> forecast) {
    check_lengths(actual, forecast);
    ErrorReport report;
    report.abs_errors.reserve(actual.size());
    for (std::size_t i = 0; i < actual.size(); ++i) {
        report.abs_errors.push_back(std::abs(actual[i] - forecast[i]));
    }
    try {
        report.mase = mase(train, actual, forecast);
    } catch (const UndefinedMetricError&) {
    }
    try {
        report.mape = mape(actual, forecast);
    } catch (const UndefinedMetricError&) {
    }
    return report;
}

} // namespace osp
