"""Centroid-conditioned feature recalibration: core ops and file-level commands."""

from ._core import (
    CentroidTable,
    ConfigError,
    FreezeViolation,
    ModelConfig,
    ModelParams,
    __version__,
    ablate,
    count_params,
    evaluate,
    gen_data,
    init_params,
    kappa_quadratic,
    load_csv,
    lr_at,
    model_forward,
    predict,
    recalibrate,
    report_from_predictions,
    train,
)

__all__ = [
    "CentroidTable",
    "ConfigError",
    "FreezeViolation",
    "ModelConfig",
    "ModelParams",
    "__version__",
    "ablate",
    "count_params",
    "evaluate",
    "gen_data",
    "init_params",
    "kappa_quadratic",
    "load_csv",
    "lr_at",
    "model_forward",
    "predict",
    "recalibrate",
    "report_from_predictions",
    "train",
]
