#include "osp/labeler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "format_util.hpp"
#include "osp/errors.hpp"
#include "osp/metrics.hpp"

namespace osp {

namespace {


double parse_double(const std::string& cell, const std::string& where) {
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) throw ParseError("bad numeric cell at " + where);
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

bool is_constant(std::span<const double> v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] != v[0]) return false;
    }
    return true;
}

} // namespace

CandidateGrid build_grid(int train_length, const SegmentationConfig& config) {
    const int m = config.m;
    const int n = config.n;
    if (m < 1 || n < 1) throw InvalidSpecError("build_grid: m and n must be >= 1");
    if (train_length < m * (n + 1)) {
        throw IneligibleSeriesError("build_grid: training length " + std::to_string(train_length) +
                                    " < m*(n+1) = " + std::to_string(m * (n + 1)));
    }
    CandidateGrid grid;
    grid.m = m;
    grid.n = n;
    grid.starts.resize(static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i) {
        const int lo = static_cast<int>(static_cast<long long>(i - 1) * train_length / m);
        const int hi = static_cast<int>(static_cast<long long>(i) * train_length / m);
        const int len = hi - lo;
        auto& row = grid.starts[static_cast<std::size_t>(i - 1)];
        for (int j = 1; j <= n; ++j) {
            const int idx = lo + static_cast<int>(static_cast<long long>(j) * len / (n + 1));
            if (train_length - idx < config.min_len) break;  // drops are a tail
            row.push_back(idx);
        }
        if (row.empty()) {
            throw IneligibleSeriesError("build_grid: interval " + std::to_string(i) +
                                        " has no candidate with suffix >= min_len");
        }
    }
    return grid;
}

LabeledExample label_series(const TimeSeries& series, const SegmentationConfig& config,
                            const ForecasterSpec& spec, MaseScale scale) {
    series.validate();
    const TrainTestSplit split = split_holdout(series, config.h);
    const TimeSeries& train = split.train;
    if (is_constant(train.values)) {
        throw IneligibleSeriesError("label_series: constant training portion in '" + series.id +
                                    "'");
    }
    const CandidateGrid grid = build_grid(train.length(), config);

    LabeledExample example;
    example.series_id = series.id;
    example.features = extract_features(train);
    example.error_matrix.assign(static_cast<std::size_t>(config.m),
                                std::vector<std::optional<double>>(
                                    static_cast<std::size_t>(config.n), std::nullopt));

    for (int i = 0; i < config.m; ++i) {
        bool any_present = false;
        const auto& row = grid.starts[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < row.size(); ++j) {
            const TimeSeries suffix = truncate_from(train, row[j]);
            try {
                const Forecast fc = forecast(spec, suffix, config.h);
                const auto& scale_values =
                    scale == MaseScale::suffix ? suffix.values : train.values;
                example.error_matrix[i][j] =
                    mase(scale_values, split.test.values, fc.values);
                any_present = true;
            } catch (const Error&) {
                // Failed candidate: cell stays absent.
            }
        }
        if (!any_present) {
            throw IneligibleSeriesError("label_series: every candidate of interval " +
                                        std::to_string(i + 1) + " failed in '" + series.id + "'");
        }
    }

    // Argmin per marking method; ties go to the later interval.
    double best_min = std::numeric_limits<double>::infinity();
    double best_avg = std::numeric_limits<double>::infinity();
    for (int i = 0; i < config.m; ++i) {
        double interval_min = std::numeric_limits<double>::infinity();
        double sum = 0.0;
        int count = 0;
        for (const auto& cell : example.error_matrix[static_cast<std::size_t>(i)]) {
            if (!cell) continue;
            interval_min = std::min(interval_min, *cell);
            sum += *cell;
            ++count;
        }
        const double interval_avg = sum / count;
        if (interval_min <= best_min) {
            best_min = interval_min;
            example.label_actual.interval = i + 1;
        }
        if (interval_avg <= best_avg) {
            best_avg = interval_avg;
            example.label_average.interval = i + 1;
        }
    }
    return example;
}

TrainingSetBuild build_training_set(const std::vector<TimeSeries>& series_list,
                                    const SegmentationConfig& config, const ForecasterSpec& spec,
                                    MaseScale scale, int jobs) {
    if (series_list.empty()) throw EmptyTrainingSetError("build_training_set: no input series");
    config.validate();

    struct Slot {
        std::optional<LabeledExample> example;
        std::string skip_reason;
    };
    std::vector<Slot> slots(series_list.size());

    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(series_list.size())));
    auto work = [&](int worker) {
        for (std::size_t i = static_cast<std::size_t>(worker); i < series_list.size();
             i += static_cast<std::size_t>(workers)) {
            try {
                slots[i].example = label_series(series_list[i], config, spec, scale);
            } catch (const Error& e) {
                slots[i].skip_reason = e.what();
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }

    TrainingSetBuild out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].example) {
            out.examples.push_back(std::move(*slots[i].example));
        } else {
            out.skipped.emplace_back(series_list[i].id, slots[i].skip_reason);
        }
    }
    if (out.examples.empty()) {
        throw EmptyTrainingSetError("build_training_set: no eligible series");
    }
    return out;
}

void write_labeled_csv(std::ostream& out, const std::vector<LabeledExample>& examples, int m,
                       int n) {
    out << "series_id";
    for (const auto& name : feature_names()) out << ',' << name;
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= n; ++j) out << ",error_" << i << '_' << j;
    }
    out << ",label_actual,label_average\n";
    for (const auto& ex : examples) {
        out << ex.series_id;
        for (double v : ex.features.values) out << ',' << detail::format_double(v);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                out << ',';
                const auto& cell = ex.error_matrix[static_cast<std::size_t>(i)]
                                                  [static_cast<std::size_t>(j)];
                if (cell) out << detail::format_double(*cell);
            }
        }
        out << ',' << ex.label_actual.interval << ',' << ex.label_average.interval << '\n';
    }
}

LabeledCsv read_labeled_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("labeled csv: missing header");
    const std::vector<std::string> header = split_csv_line(line);
    const auto& names = feature_names();
    const std::size_t expected_prefix = 1 + names.size();
    if (header.size() < expected_prefix + 3 || header[0] != "series_id") {
        throw ParseError("labeled csv: unexpected header");
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (header[1 + i] != names[i]) {
            throw ParseError("labeled csv: feature column " + std::to_string(i + 2) +
                             " is '" + header[1 + i] + "', expected '" + names[i] + "'");
        }
    }
    if (header[header.size() - 2] != "label_actual" || header.back() != "label_average") {
        throw ParseError("labeled csv: label columns missing");
    }
    const std::size_t n_error_cols = header.size() - expected_prefix - 2;
    // Error columns are named error_<i>_<j>; geometry comes from the last one.
    int m = 0, n = 0;
    if (n_error_cols > 0) {
        const std::string& last = header[expected_prefix + n_error_cols - 1];
        if (last.rfind("error_", 0) != 0) throw ParseError("labeled csv: bad error column name");
        std::istringstream ss(last.substr(6));
        char sep = 0;
        if (!(ss >> m >> sep >> n) || sep != '_' || m < 1 || n < 1 ||
            static_cast<std::size_t>(m) * static_cast<std::size_t>(n) != n_error_cols) {
            throw ParseError("labeled csv: inconsistent error columns");
        }
    }

    LabeledCsv result;
    result.m = m;
    result.n = n;
    int row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ParseError("labeled csv: row " + std::to_string(row_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
        }
        LabeledExample ex;
        ex.series_id = cells[0];
        for (std::size_t i = 0; i < names.size(); ++i) {
            ex.features.values[i] = parse_double(
                cells[1 + i], "row " + std::to_string(row_no) + " col " + std::to_string(i + 2));
        }
        ex.error_matrix.assign(static_cast<std::size_t>(m),
                               std::vector<std::optional<double>>(static_cast<std::size_t>(n),
                                                                  std::nullopt));
        for (std::size_t k = 0; k < n_error_cols; ++k) {
            const std::string& cell = cells[expected_prefix + k];
            if (cell.empty()) continue;
            ex.error_matrix[k / static_cast<std::size_t>(n)][k % static_cast<std::size_t>(n)] =
                parse_double(cell, "row " + std::to_string(row_no) + " col " +
                                       std::to_string(expected_prefix + k + 1));
        }
        ex.label_actual.interval = static_cast<int>(parse_double(
            cells[header.size() - 2], "row " + std::to_string(row_no) + " label_actual"));
        ex.label_average.interval = static_cast<int>(
            parse_double(cells.back(), "row " + std::to_string(row_no) + " label_average"));
        result.examples.push_back(std::move(ex));
    }
    return result;
}

} // namespace osp
