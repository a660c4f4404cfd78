#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "osp/data_io.hpp"
#include "osp/engine.hpp"
#include "osp/errors.hpp"
#include "osp/evaluation.hpp"
#include "osp/features.hpp"
#include "osp/forecasters.hpp"
#include "osp/labeler.hpp"
#include "osp/metrics.hpp"
#include "osp/series.hpp"

namespace py = pybind11;

namespace {

osp::ForecasterSpec spec_of(const std::string& base) {
    return {.kind = osp::forecaster_kind_from_string(base)};
}

osp::MaseScale scale_of(const std::string& scale) {
    if (scale == "suffix") return osp::MaseScale::suffix;
    if (scale == "full") return osp::MaseScale::full;
    throw osp::InvalidSpecError("scale must be 'suffix' or 'full'");
}

osp::OspMethod method_of(const std::string& label, const std::string& objective) {
    osp::OspMethod method;
    if (label == "actual") {
        method.label_kind = osp::LabelKind::actual;
    } else if (label == "average") {
        method.label_kind = osp::LabelKind::average;
    } else {
        throw osp::InvalidSpecError("label must be 'actual' or 'average'");
    }
    if (objective == "cls") {
        method.model_kind = osp::ModelKind::classification;
    } else if (objective == "reg") {
        method.model_kind = osp::ModelKind::regression;
    } else {
        throw osp::InvalidSpecError("objective must be 'cls' or 'reg'");
    }
    return method;
}

std::vector<std::vector<std::optional<double>>> matrix_of(const osp::LabeledExample& ex) {
    return ex.error_matrix;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Optimal-starting-point time series forecasting";

    py::class_<osp::TimeSeries>(m, "TimeSeries")
        .def(py::init([](std::vector<double> values, int frequency, std::string id) {
                 osp::TimeSeries s;
                 s.values = std::move(values);
                 s.frequency = frequency;
                 s.id = std::move(id);
                 s.validate();
                 return s;
             }),
             py::arg("values"), py::arg("frequency") = 1, py::arg("id") = "")
        .def_readonly("values", &osp::TimeSeries::values)
        .def_readonly("frequency", &osp::TimeSeries::frequency)
        .def_readonly("id", &osp::TimeSeries::id)
        .def("__len__", [](const osp::TimeSeries& s) { return s.values.size(); })
        .def("__repr__", [](const osp::TimeSeries& s) {
            std::ostringstream out;
            out << "TimeSeries(id='" << s.id << "', length=" << s.length()
                << ", frequency=" << s.frequency << ")";
            return out.str();
        });

    py::class_<osp::SegmentationConfig>(m, "SegmentationConfig")
        .def(py::init([](int m_, int n_, int h_, int min_len) {
                 osp::SegmentationConfig config;
                 config.m = m_;
                 config.n = n_;
                 config.h = h_;
                 config.min_len = min_len > 0 ? min_len : osp::default_min_len(h_, 1);
                 return config;
             }),
             py::arg("m") = 5, py::arg("n") = 4, py::arg("h") = 6, py::arg("min_len") = 0)
        .def_readwrite("m", &osp::SegmentationConfig::m)
        .def_readwrite("n", &osp::SegmentationConfig::n)
        .def_readwrite("h", &osp::SegmentationConfig::h)
        .def_readwrite("min_len", &osp::SegmentationConfig::min_len);

    py::class_<osp::GbdtParams>(m, "GbdtParams")
        .def(py::init<>())
        .def_readwrite("rounds", &osp::GbdtParams::rounds)
        .def_readwrite("learning_rate", &osp::GbdtParams::learning_rate)
        .def_readwrite("max_depth", &osp::GbdtParams::max_depth)
        .def_readwrite("min_samples_leaf", &osp::GbdtParams::min_samples_leaf)
        .def_readwrite("lambda_", &osp::GbdtParams::lambda)
        .def_readwrite("gamma", &osp::GbdtParams::gamma)
        .def_readwrite("seed", &osp::GbdtParams::seed);

    py::class_<osp::GbdtModel>(m, "GbdtModel")
        .def_property_readonly("objective",
                               [](const osp::GbdtModel& model) {
                                   return model.objective == osp::Objective::multiclass
                                              ? "multiclass"
                                              : "regression";
                               })
        .def_readonly("num_class", &osp::GbdtModel::num_class)
        .def_readonly("feature_names", &osp::GbdtModel::feature_names)
        .def_readonly("training_loss", &osp::GbdtModel::training_loss)
        .def("feature_importance",
             [](const osp::GbdtModel& model) { return osp::feature_importance(model); })
        .def("predict_raw", [](const osp::GbdtModel& model, const std::vector<double>& x) {
            return osp::predict_raw(model, x);
        });

    py::class_<osp::LabeledExample>(m, "LabeledExample")
        .def_readonly("series_id", &osp::LabeledExample::series_id)
        .def_property_readonly(
            "features",
            [](const osp::LabeledExample& ex) {
                return std::vector<double>(ex.features.values.begin(), ex.features.values.end());
            })
        .def_property_readonly("error_matrix", &matrix_of)
        .def_property_readonly(
            "label_actual",
            [](const osp::LabeledExample& ex) { return ex.label_actual.interval; })
        .def_property_readonly("label_average", [](const osp::LabeledExample& ex) {
            return ex.label_average.interval;
        });

    py::class_<osp::Forecast>(m, "Forecast")
        .def_readonly("values", &osp::Forecast::values)
        .def_readonly("model_name", &osp::Forecast::model_name)
        .def_readonly("origin_length", &osp::Forecast::origin_length);

    py::class_<osp::OspForecastResult>(m, "OspForecastResult")
        .def_readonly("series_id", &osp::OspForecastResult::series_id)
        .def_property_readonly(
            "predicted_interval",
            [](const osp::OspForecastResult& r) { return r.predicted_interval.interval; })
        .def_readonly("component_forecasts", &osp::OspForecastResult::component_forecasts)
        .def_readonly("final_forecast", &osp::OspForecastResult::final_forecast);

    py::class_<osp::ProcessParams>(m, "ProcessParams")
        .def(py::init<>())
        .def_readwrite("level", &osp::ProcessParams::level)
        .def_readwrite("ar", &osp::ProcessParams::ar)
        .def_readwrite("trend", &osp::ProcessParams::trend)
        .def_readwrite("seasonal_amplitude", &osp::ProcessParams::seasonal_amplitude)
        .def_readwrite("noise_sd", &osp::ProcessParams::noise_sd);

    py::class_<osp::SyntheticSpec>(m, "SyntheticSpec")
        .def(py::init<>())
        .def_readwrite("count", &osp::SyntheticSpec::count)
        .def_readwrite("min_length", &osp::SyntheticSpec::min_length)
        .def_readwrite("max_length", &osp::SyntheticSpec::max_length)
        .def_readwrite("frequency", &osp::SyntheticSpec::frequency)
        .def_readwrite("break_probability", &osp::SyntheticSpec::break_probability)
        .def_readwrite("pre", &osp::SyntheticSpec::pre)
        .def_readwrite("post", &osp::SyntheticSpec::post)
        .def_readwrite("seed", &osp::SyntheticSpec::seed)
        .def_readwrite("id_prefix", &osp::SyntheticSpec::id_prefix);

    m.def("feature_names", [] {
        return std::vector<std::string>(osp::feature_names().begin(),
                                        osp::feature_names().end());
    });
    m.def(
        "extract_features",
        [](const osp::TimeSeries& s) {
            const osp::FeatureVector fv = osp::extract_features(s);
            return std::vector<double>(fv.values.begin(), fv.values.end());
        },
        py::arg("series"));
    m.def(
        "truncate_from",
        [](const osp::TimeSeries& s, int start) { return osp::truncate_from(s, start); },
        py::arg("series"), py::arg("start"));
    m.def(
        "split_holdout",
        [](const osp::TimeSeries& s, int h) {
            const osp::TrainTestSplit split = osp::split_holdout(s, h);
            return py::make_tuple(split.train, split.test);
        },
        py::arg("series"), py::arg("h"));
    m.def(
        "forecast",
        [](const osp::TimeSeries& s, int h, const std::string& base) {
            return osp::forecast(spec_of(base), s, h);
        },
        py::arg("series"), py::arg("h"), py::arg("base") = "ses");
    m.def("mase", [](const std::vector<double>& train, const std::vector<double>& actual,
                     const std::vector<double>& fc) { return osp::mase(train, actual, fc); });
    m.def("mape", [](const std::vector<double>& actual, const std::vector<double>& fc) {
        return osp::mape(actual, fc);
    });
    m.def(
        "label_series",
        [](const osp::TimeSeries& s, const osp::SegmentationConfig& config,
           const std::string& base, const std::string& scale) {
            return osp::label_series(s, config, spec_of(base), scale_of(scale));
        },
        py::arg("series"), py::arg("config"), py::arg("base") = "ses",
        py::arg("scale") = "suffix");
    m.def(
        "build_training_set",
        [](const std::vector<osp::TimeSeries>& series_list,
           const osp::SegmentationConfig& config, const std::string& base,
           const std::string& scale, int jobs) {
            const osp::TrainingSetBuild built = osp::build_training_set(
                series_list, config, spec_of(base), scale_of(scale), jobs);
            return py::make_tuple(built.examples, built.skipped);
        },
        py::arg("series_list"), py::arg("config"), py::arg("base") = "ses",
        py::arg("scale") = "suffix", py::arg("jobs") = 1);
    m.def(
        "train_osp",
        [](const std::vector<osp::LabeledExample>& examples, const std::string& label,
           const std::string& objective, const osp::GbdtParams& params) {
            return osp::train_osp(examples, method_of(label, objective), params);
        },
        py::arg("examples"), py::arg("label") = "average", py::arg("objective") = "cls",
        py::arg("params") = osp::GbdtParams{});
    m.def(
        "predict_interval",
        [](const osp::GbdtModel& model, const std::vector<double>& features, int m_) {
            if (features.size() != osp::kFeatureCount) {
                throw osp::InvalidSpecError("features must have the frozen width");
            }
            osp::FeatureVector fv;
            std::copy(features.begin(), features.end(), fv.values.begin());
            return osp::predict_interval(model, fv, m_).interval;
        },
        py::arg("model"), py::arg("features"), py::arg("m"));
    m.def(
        "osp_forecast",
        [](const osp::TimeSeries& s, const osp::GbdtModel& model,
           const osp::SegmentationConfig& config, const std::string& base,
           const std::string& label) {
            const std::string objective =
                model.objective == osp::Objective::multiclass ? "cls" : "reg";
            return osp::osp_forecast(s, model, config, spec_of(base),
                                     method_of(label, objective));
        },
        py::arg("series"), py::arg("model"), py::arg("config"), py::arg("base") = "ses",
        py::arg("label") = "average");
    m.def(
        "combine",
        [](const std::vector<osp::OspForecastResult>& results, const std::string& mode) {
            osp::CombineMode combine_mode = osp::CombineMode::all;
            if (mode == "cls") combine_mode = osp::CombineMode::classification_only;
            else if (mode == "reg") combine_mode = osp::CombineMode::regression_only;
            else if (mode != "all") throw osp::InvalidSpecError("mode must be all|cls|reg");
            return osp::combine(results, combine_mode);
        },
        py::arg("results"), py::arg("mode") = "all");
    m.def(
        "random_start_forecast",
        [](const osp::TimeSeries& s, const osp::SegmentationConfig& config,
           const std::string& base, std::uint64_t seed) {
            return osp::random_start_forecast(s, config, spec_of(base), seed);
        },
        py::arg("series"), py::arg("config"), py::arg("base") = "ses", py::arg("seed") = 0);
    m.def(
        "cusum_changepoint",
        [](const osp::TimeSeries& s, double threshold) {
            return osp::cusum_changepoint(s, threshold);
        },
        py::arg("series"), py::arg("threshold") = 1.358);
    m.def(
        "changepoint_forecast",
        [](const osp::TimeSeries& s, const std::string& base, int h) {
            return osp::changepoint_forecast(s, spec_of(base), h);
        },
        py::arg("series"), py::arg("base") = "ses", py::arg("h") = 6);
    m.def("generate_synthetic", &osp::generate_synthetic, py::arg("spec"));
    m.def("break_index_of", &osp::break_index_of, py::arg("series_id"));
    m.def("save_model", &osp::save_model, py::arg("model"), py::arg("path"));
    m.def("load_model", &osp::load_model, py::arg("path"));
    m.def(
        "evaluate_corpus",
        [](const std::vector<osp::TimeSeries>& series_list,
           const osp::SegmentationConfig& config, const std::string& base,
           const osp::GbdtParams& params, double train_fraction, int jobs,
           std::uint64_t seed) {
            osp::EvaluateOptions options;
            options.config = config;
            options.base = spec_of(base);
            options.gbdt = params;
            options.train_fraction = train_fraction;
            options.jobs = jobs;
            options.seed = seed;
            const osp::EvaluationResult result = osp::run_evaluation(series_list, options);
            py::dict summary;
            for (const auto& row : result.summary) {
                py::dict entry;
                entry["mean_mase"] =
                    row.mean_mase ? py::cast(*row.mean_mase) : py::none().cast<py::object>();
                entry["mean_mape"] =
                    row.mean_mape ? py::cast(*row.mean_mape) : py::none().cast<py::object>();
                entry["count"] = row.count;
                summary[row.method.c_str()] = entry;
            }
            py::list rows;
            for (const auto& row : result.rows) {
                py::dict entry;
                entry["series_id"] = row.series_id;
                entry["method"] = row.method;
                entry["mase"] = row.mase ? py::cast(*row.mase) : py::none().cast<py::object>();
                entry["mape"] = row.mape ? py::cast(*row.mape) : py::none().cast<py::object>();
                rows.append(entry);
            }
            return py::make_tuple(rows, summary);
        },
        py::arg("series_list"), py::arg("config"), py::arg("base") = "ses",
        py::arg("params") = osp::GbdtParams{}, py::arg("train_fraction") = 0.7,
        py::arg("jobs") = 1, py::arg("seed") = 42);

    m.attr("__version__") = "0.1.0";
}
