#pragma once

#include <optional>
#include <span>
#include <vector>

namespace osp {

/// Error summary for one forecast. A metric left unset was undefined for the
/// inputs (constant scaling series for MASE, a zero actual for MAPE).
struct ErrorReport {
    std::optional<double> mase;
    std::optional<double> mape;
    std::vector<double> abs_errors;
};

/// Mean absolute error scaled by the mean absolute first difference of
/// `train`. Throws UndefinedMetricError when `train` is constant.
double mase(std::span<const double> train, std::span<const double> actual,
            std::span<const double> forecast);

/// Mean absolute percentage error (in percent). Throws UndefinedMetricError
/// when any actual value is zero.
double mape(std::span<const double> actual, std::span<const double> forecast);

/// Both metrics at once, each flagged independently instead of throwing.
ErrorReport evaluate(std::span<const double> train, std::span<const double> actual,
                     std::span<const double> forecast);

} // namespace osp
