#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "osp/features.hpp"
#include "osp/forecasters.hpp"
#include "osp/series.hpp"

namespace osp {

/// 1-based index of a sub-interval, in [1, m].
struct IntervalLabel {
    int interval = 1;
};

/// Candidate starting points per sub-interval. Interval i (1-based) spans
/// [floor((i-1)*T/m), floor(i*T/m)); candidate j (1..n) sits at
/// s + floor(j*L/(n+1)). Candidates whose suffix would undercut min_len are
/// dropped; drops always form a tail of an interval's list.
struct CandidateGrid {
    int m = 0;
    int n = 0;
    std::vector<std::vector<int>> starts;
};

/// Throws IneligibleSeriesError when any interval is left without a valid
/// candidate (requires train_length >= m*(n+1)).
CandidateGrid build_grid(int train_length, const SegmentationConfig& config);

/// Which series the MASE denominator is computed on while labeling:
/// the truncated suffix fed to the forecaster, or the full training portion.
enum class MaseScale { suffix, full };

/// One supervised training example: features of the training portion plus the
/// m x n candidate error matrix and the interval labels under both marking
/// methods. Absent cells are candidates that were dropped or failed.
struct LabeledExample {
    std::string series_id;
    FeatureVector features;
    std::vector<std::vector<std::optional<double>>> error_matrix;
    IntervalLabel label_actual;
    IntervalLabel label_average;
};

/// Brute-forces the candidate errors against the final-h holdout and marks
/// both labels (ties broken toward the later interval). Throws
/// IneligibleSeriesError when the series cannot be labeled.
LabeledExample label_series(const TimeSeries& series, const SegmentationConfig& config,
                            const ForecasterSpec& spec, MaseScale scale = MaseScale::suffix);

struct TrainingSetBuild {
    std::vector<LabeledExample> examples;                       // input order
    std::vector<std::pair<std::string, std::string>> skipped;   // id, reason
};

/// Labels every eligible series; ineligible ones are recorded in `skipped`.
/// Output is identical for any worker count. Throws EmptyTrainingSetError
/// when nothing survives.
TrainingSetBuild build_training_set(const std::vector<TimeSeries>& series_list,
                                    const SegmentationConfig& config, const ForecasterSpec& spec,
                                    MaseScale scale = MaseScale::suffix, int jobs = 1);

/// CSV with the frozen feature columns, m*n error columns (absent = empty
/// field) and both labels.
void write_labeled_csv(std::ostream& out, const std::vector<LabeledExample>& examples,
                       int m, int n);

struct LabeledCsv {
    int m = 0;
    int n = 0;
    std::vector<LabeledExample> examples;
};

LabeledCsv read_labeled_csv(std::istream& in);

} // namespace osp
