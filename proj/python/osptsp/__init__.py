"""Optimal-starting-point time series forecasting.

Learns which suffix of a series gives the lowest forecast error, forecasts
from candidate points inside the predicted interval, and averages the results.
"""

from ._core import (
    Forecast,
    GbdtModel,
    GbdtParams,
    LabeledExample,
    OspForecastResult,
    ProcessParams,
    SegmentationConfig,
    SyntheticSpec,
    TimeSeries,
    __version__,
    break_index_of,
    build_training_set,
    changepoint_forecast,
    combine,
    cusum_changepoint,
    evaluate_corpus,
    extract_features,
    feature_names,
    forecast,
    generate_synthetic,
    label_series,
    load_model,
    mape,
    mase,
    osp_forecast,
    predict_interval,
    random_start_forecast,
    save_model,
    split_holdout,
    train_osp,
    truncate_from,
)

__all__ = [
    "Forecast",
    "GbdtModel",
    "GbdtParams",
    "LabeledExample",
    "OspForecastResult",
    "ProcessParams",
    "SegmentationConfig",
    "SyntheticSpec",
    "TimeSeries",
    "__version__",
    "break_index_of",
    "build_training_set",
    "changepoint_forecast",
    "combine",
    "cusum_changepoint",
    "evaluate_corpus",
    "extract_features",
    "feature_names",
    "forecast",
    "generate_synthetic",
    "label_series",
    "load_model",
    "mape",
    "mase",
    "osp_forecast",
    "predict_interval",
    "random_start_forecast",
    "save_model",
    "split_holdout",
    "train_osp",
    "truncate_from",
]
