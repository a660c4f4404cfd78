// osp: optimal-starting-point forecasting pipeline over M4-style CSV corpora.
//
// Subcommands: generate, features, label, train, forecast, evaluate.
// Every flag can also come from an OSP_-prefixed environment variable or a
// config file (flags > config file > defaults). Result files are CSV; all
// diagnostics go to stderr.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "osp/data_io.hpp"
#include "osp/engine.hpp"
#include "osp/errors.hpp"
#include "osp/evaluation.hpp"
#include "osp/features.hpp"
#include "osp/labeler.hpp"
#include "osp/metrics.hpp"
#include "osp/series.hpp"

namespace {

struct CommonFlags {
    std::string input;
    std::string output;
    int frequency = 1;
    int m = 5;
    int n = 4;
    int horizon = 0;   // 0: per-frequency default
    int min_len = 0;   // 0: derived from horizon and frequency
    std::string base_model = "ses";
    std::string label_kind = "average";
    std::string objective = "cls";
    std::string mase_scale = "suffix";
    int jobs = 1;
    std::uint64_t seed = 42;
    osp::GbdtParams gbdt;
};

std::string env_name(const std::string& flag) {
    std::string name = "OSP_";
    for (char c : flag) name += c == '-' ? '_' : static_cast<char>(std::toupper(c));
    return name;
}

CLI::Option* add_flag(CLI::App* app, const std::string& name, auto& target,
                      const std::string& help) {
    return app->add_option("--" + name, target, help)->envname(env_name(name));
}

void add_segmentation_flags(CLI::App* app, CommonFlags& flags) {
    add_flag(app, "m", flags.m, "number of sub-intervals");
    add_flag(app, "n", flags.n, "candidate starting points per sub-interval");
    add_flag(app, "horizon", flags.horizon, "forecast horizon (0: frequency default)");
    add_flag(app, "min-len", flags.min_len, "minimum suffix length (0: derived)");
    add_flag(app, "base-model", flags.base_model,
             "base forecaster {naive|snaive|ses|holt|hw|ets|theta}");
    add_flag(app, "mase-scale", flags.mase_scale, "labeling MASE denominator {suffix|full}");
    add_flag(app, "jobs", flags.jobs, "worker threads");
    add_flag(app, "seed", flags.seed, "seed for stochastic baselines");
}

void add_gbdt_flags(CLI::App* app, CommonFlags& flags) {
    add_flag(app, "rounds", flags.gbdt.rounds, "boosting rounds");
    add_flag(app, "learning-rate", flags.gbdt.learning_rate, "shrinkage per round");
    add_flag(app, "max-depth", flags.gbdt.max_depth, "tree depth limit");
    add_flag(app, "min-samples-leaf", flags.gbdt.min_samples_leaf, "leaf size floor");
    add_flag(app, "lambda", flags.gbdt.lambda, "leaf-weight L2 penalty");
    add_flag(app, "gamma", flags.gbdt.gamma, "per-leaf penalty");
}

osp::SegmentationConfig make_config(const CommonFlags& flags) {
    osp::SegmentationConfig config;
    config.m = flags.m;
    config.n = flags.n;
    config.h = flags.horizon > 0
                   ? flags.horizon
                   : osp::default_horizon(flags.frequency).value_or(0);
    if (config.h <= 0) {
        throw osp::InvalidSpecError(
            "no default horizon for frequency " + std::to_string(flags.frequency) +
            "; pass --horizon");
    }
    config.min_len = flags.min_len > 0 ? flags.min_len
                                       : osp::default_min_len(config.h, flags.frequency);
    config.validate(flags.frequency);
    return config;
}

osp::ForecasterSpec make_base(const CommonFlags& flags) {
    return {.kind = osp::forecaster_kind_from_string(flags.base_model)};
}

osp::MaseScale make_scale(const CommonFlags& flags) {
    if (flags.mase_scale == "suffix") return osp::MaseScale::suffix;
    if (flags.mase_scale == "full") return osp::MaseScale::full;
    throw osp::InvalidSpecError("--mase-scale must be suffix or full");
}

osp::OspMethod make_method(const CommonFlags& flags) {
    osp::OspMethod method;
    if (flags.label_kind == "actual") {
        method.label_kind = osp::LabelKind::actual;
    } else if (flags.label_kind == "average") {
        method.label_kind = osp::LabelKind::average;
    } else {
        throw osp::InvalidSpecError("--label must be actual or average");
    }
    if (flags.objective == "cls") {
        method.model_kind = osp::ModelKind::classification;
    } else if (flags.objective == "reg") {
        method.model_kind = osp::ModelKind::regression;
    } else {
        throw osp::InvalidSpecError("--objective must be cls or reg");
    }
    return method;
}

void validate_common(const CommonFlags& flags) {
    if (flags.frequency < 1) throw osp::InvalidSpecError("--frequency must be >= 1");
    if (flags.jobs < 1) throw osp::InvalidSpecError("--jobs must be >= 1");
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw osp::ParseError("cannot write '" + path + "'");
    return out;
}

int cmd_generate(const CommonFlags& flags, const osp::SyntheticSpec& spec) {
    const std::vector<osp::TimeSeries> corpus = osp::generate_synthetic(spec);
    osp::write_m4_csv(flags.output, corpus);
    std::cerr << "wrote " << corpus.size() << " series to " << flags.output << "\n";
    return 0;
}

int cmd_features(const CommonFlags& flags) {
    validate_common(flags);
    const auto series_list = osp::load_m4_csv(flags.input, flags.frequency, &std::cerr);
    if (series_list.empty()) throw osp::EmptyTrainingSetError("no series in input");
    std::ofstream out = open_output(flags.output);
    out << osp::features_csv_header() << '\n';
    int written = 0;
    for (const auto& series : series_list) {
        try {
            out << osp::features_csv_row(series.id, osp::extract_features(series)) << '\n';
            ++written;
        } catch (const osp::Error& e) {
            std::cerr << "skipping " << series.id << ": " << e.what() << '\n';
        }
    }
    if (written == 0) throw osp::EmptyTrainingSetError("no series was feature-eligible");
    std::cerr << "wrote features for " << written << " series\n";
    return 0;
}

int cmd_label(const CommonFlags& flags) {
    validate_common(flags);
    const osp::SegmentationConfig config = make_config(flags);
    make_scale(flags);
    const auto series_list = osp::load_m4_csv(flags.input, flags.frequency, &std::cerr);
    const osp::TrainingSetBuild built = osp::build_training_set(
        series_list, config, make_base(flags), make_scale(flags), flags.jobs);
    for (const auto& [id, reason] : built.skipped) {
        std::cerr << "skipping " << id << ": " << reason << '\n';
    }
    std::ofstream out = open_output(flags.output);
    osp::write_labeled_csv(out, built.examples, config.m, config.n);
    std::cerr << "labeled " << built.examples.size() << " series (" << built.skipped.size()
              << " skipped)\n";
    return 0;
}

int cmd_train(const CommonFlags& flags, const std::string& labels_path,
              const std::string& model_out) {
    flags.gbdt.validate();
    make_method(flags);
    std::ifstream in(labels_path);
    if (!in) throw osp::ParseError("cannot open '" + labels_path + "'");
    const osp::LabeledCsv labeled = osp::read_labeled_csv(in);
    if (labeled.examples.empty()) throw osp::EmptyTrainingSetError("labels file has no rows");
    const osp::GbdtModel model =
        osp::train_osp(labeled.examples, make_method(flags), flags.gbdt);
    osp::save_model(model, model_out);

    const auto ranked = osp::feature_importance(model);
    std::cout << "feature,total_gain\n";
    for (std::size_t i = 0; i < ranked.size() && i < 5; ++i) {
        std::cout << ranked[i].first << ',' << ranked[i].second << '\n';
    }
    std::cerr << "trained on " << labeled.examples.size() << " examples -> " << model_out
              << '\n';
    return 0;
}

int cmd_forecast(const CommonFlags& flags, const std::string& model_path) {
    validate_common(flags);
    const osp::SegmentationConfig config = make_config(flags);
    const auto series_list = osp::load_m4_csv(flags.input, flags.frequency, &std::cerr);
    const osp::GbdtModel model = osp::load_model(model_path);
    osp::OspMethod method = make_method(flags);
    method.model_kind = model.objective == osp::Objective::multiclass
                            ? osp::ModelKind::classification
                            : osp::ModelKind::regression;

    std::ofstream out = open_output(flags.output);
    out << "series_id,predicted_interval";
    for (int k = 1; k <= config.h; ++k) out << ",f" << k;
    out << '\n';
    int done = 0, failed = 0;
    for (const auto& series : series_list) {
        try {
            const osp::OspForecastResult result =
                osp::osp_forecast(series, model, config, make_base(flags), method);
            out << series.id << ',' << result.predicted_interval.interval;
            for (double v : result.final_forecast.values) out << ',' << v;
            out << '\n';
            ++done;
        } catch (const osp::Error& e) {
            std::cerr << "failed " << series.id << ": " << e.what() << '\n';
            ++failed;
        }
    }
    std::cerr << "forecast " << done << " series (" << failed << " failed)\n";
    return done == 0 ? 1 : 0;
}

int cmd_evaluate(const CommonFlags& flags, double train_fraction,
                 const std::string& models_prefix, const std::string& summary_path) {
    validate_common(flags);
    osp::EvaluateOptions options;
    options.config = make_config(flags);
    options.base = make_base(flags);
    options.gbdt = flags.gbdt;
    options.gbdt.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw osp::InvalidSpecError("--train-frac must lie in (0, 1)");
    }
    options.train_fraction = train_fraction;
    options.label_scale = make_scale(flags);
    options.jobs = flags.jobs;
    options.seed = flags.seed;
    if (!models_prefix.empty()) {
        for (const char* name : {"actual_cls", "actual_reg", "average_cls", "average_reg"}) {
            options.pretrained.emplace(name,
                                       osp::load_model(models_prefix + name + ".json"));
        }
    }
    const auto series_list = osp::load_m4_csv(flags.input, flags.frequency, &std::cerr);

    const osp::EvaluationResult result = osp::run_evaluation(series_list, options, &std::cerr);

    std::ofstream out = open_output(flags.output);
    osp::write_results_csv(out, result.rows);
    const std::string summary_file =
        summary_path.empty() ? flags.output + ".summary.csv" : summary_path;
    std::ofstream summary = open_output(summary_file);
    osp::write_summary_csv(summary, result.summary);
    osp::write_summary_csv(std::cout, result.summary);
    std::cerr << "wrote " << flags.output << " and " << summary_file << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal-starting-point time series forecasting"};
    app.require_subcommand(1);
    app.set_config("--config")->envname("OSP_CONFIG");

    CommonFlags flags;
    osp::SyntheticSpec synthetic;
    std::string labels_path, model_path, models_prefix, summary_path;
    double train_fraction = 0.7;

    CLI::App* generate = app.add_subcommand("generate", "write a synthetic break corpus");
    add_flag(generate, "count", synthetic.count, "number of series");
    add_flag(generate, "min-length", synthetic.min_length, "shortest series");
    add_flag(generate, "max-length", synthetic.max_length, "longest series");
    add_flag(generate, "frequency", synthetic.frequency, "observations per cycle");
    add_flag(generate, "break-prob", synthetic.break_probability, "structural break probability");
    add_flag(generate, "seed", synthetic.seed, "generator seed");
    add_flag(generate, "pre-level", synthetic.pre.level, "pre-break level");
    add_flag(generate, "pre-ar", synthetic.pre.ar, "pre-break AR(1) coefficient");
    add_flag(generate, "pre-trend", synthetic.pre.trend, "pre-break slope");
    add_flag(generate, "pre-sd", synthetic.pre.noise_sd, "pre-break noise sd");
    add_flag(generate, "pre-seasonal-amp", synthetic.pre.seasonal_amplitude,
             "pre-break seasonal amplitude");
    add_flag(generate, "post-level", synthetic.post.level, "post-break level");
    add_flag(generate, "post-ar", synthetic.post.ar, "post-break AR(1) coefficient");
    add_flag(generate, "post-trend", synthetic.post.trend, "post-break slope");
    add_flag(generate, "post-sd", synthetic.post.noise_sd, "post-break noise sd");
    add_flag(generate, "post-seasonal-amp", synthetic.post.seasonal_amplitude,
             "post-break seasonal amplitude");
    add_flag(generate, "output", flags.output, "output CSV")->required();

    CLI::App* features = app.add_subcommand("features", "extract the feature matrix");
    add_flag(features, "input", flags.input, "input CSV")->required();
    add_flag(features, "frequency", flags.frequency, "observations per cycle");
    add_flag(features, "output", flags.output, "output CSV")->required();

    CLI::App* label = app.add_subcommand("label", "build the labeled training set");
    add_flag(label, "input", flags.input, "input CSV")->required();
    add_flag(label, "frequency", flags.frequency, "observations per cycle");
    add_flag(label, "output", flags.output, "output CSV")->required();
    add_segmentation_flags(label, flags);

    CLI::App* train = app.add_subcommand("train", "train a starting-interval model");
    add_flag(train, "labels", labels_path, "labeled CSV from the label step")->required();
    add_flag(train, "label", flags.label_kind, "marking method {actual|average}");
    add_flag(train, "objective", flags.objective, "learner objective {cls|reg}");
    add_flag(train, "model-out", model_path, "model JSON path")->required();
    add_gbdt_flags(train, flags);

    CLI::App* forecast_cmd = app.add_subcommand("forecast", "forecast from predicted intervals");
    add_flag(forecast_cmd, "input", flags.input, "input CSV")->required();
    add_flag(forecast_cmd, "frequency", flags.frequency, "observations per cycle");
    add_flag(forecast_cmd, "model", model_path, "model JSON")->required();
    add_flag(forecast_cmd, "output", flags.output, "output CSV")->required();
    add_segmentation_flags(forecast_cmd, flags);

    CLI::App* evaluate = app.add_subcommand("evaluate", "compare all methods on a holdout");
    add_flag(evaluate, "input", flags.input, "input CSV")->required();
    add_flag(evaluate, "frequency", flags.frequency, "observations per cycle");
    add_flag(evaluate, "output", flags.output, "per-series results CSV")->required();
    add_flag(evaluate, "summary", summary_path, "summary CSV (default <output>.summary.csv)");
    add_flag(evaluate, "train-frac", train_fraction, "fraction used to train the models");
    add_flag(evaluate, "models-prefix", models_prefix,
             "load pre-trained models <prefix><method>.json instead of training");
    add_segmentation_flags(evaluate, flags);
    add_gbdt_flags(evaluate, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(flags, synthetic);
        if (features->parsed()) return cmd_features(flags);
        if (label->parsed()) return cmd_label(flags);
        if (train->parsed()) return cmd_train(flags, labels_path, model_path);
        if (forecast_cmd->parsed()) return cmd_forecast(flags, model_path);
        if (evaluate->parsed()) {
            return cmd_evaluate(flags, train_fraction, models_prefix, summary_path);
        }
    } catch (const osp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
