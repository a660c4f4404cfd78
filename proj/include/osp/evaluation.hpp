#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "osp/engine.hpp"
#include "osp/labeler.hpp"
#include "osp/series.hpp"

namespace osp {

/// Everything cmd_evaluate needs: geometry, base model, learner params, the
/// train/eval split (used when no pre-trained models are supplied), labeling
/// scale, worker count and the random-start seed.
struct EvaluateOptions {
    SegmentationConfig config;
    ForecasterSpec base;
    GbdtParams gbdt;
    double train_fraction = 0.7;
    MaseScale label_scale = MaseScale::suffix;
    int jobs = 1;
    std::uint64_t seed = 42;
    /// Pre-trained models keyed by method name; when present all input series
    /// are evaluated and no in-process training happens.
    std::map<std::string, GbdtModel> pretrained;
};

struct ResultRow {
    std::string series_id;
    std::string method;
    std::optional<double> mase;
    std::optional<double> mape;
};

struct SummaryRow {
    std::string method;
    std::optional<double> mean_mase;
    std::optional<double> mean_mape;
    int count = 0;  // series with a defined MASE
};

struct EvaluationResult {
    std::vector<ResultRow> rows;
    std::vector<SummaryRow> summary;
    std::vector<std::pair<std::string, std::string>> skipped;  // id, reason
};

/// Fixed method order of the result rows.
const std::vector<std::string>& evaluation_methods();

/// Full comparison run: split, label, train the four method models, then
/// score every method on each evaluation series against its final-h holdout
/// (MASE scaled by the full pre-holdout series). Output is byte-identical
/// for any `jobs` value.
EvaluationResult run_evaluation(const std::vector<TimeSeries>& series_list,
                                const EvaluateOptions& options, std::ostream* diag = nullptr);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);

} // namespace osp
