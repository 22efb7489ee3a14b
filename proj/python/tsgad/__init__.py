"""GAN-based time-series anomaly detection."""

__all__ = [
    "AnomalousSequence",
    "ConfigError",
    "ConfusionCounts",
    "DataError",
    "DetectionOutput",
    "GroundTruthWindows",
    "Metrics",
    "ModelBundle",
    "TimeSeries",
    "TrainingError",
    "ablation_variants",
    "aggregate",
    "detect",
    "detrend",
    "dtw_distance",
    "error_area",
    "error_dtw",
    "error_pointwise",
    "evaluate",
    "generate_synthetic",
    "load_labels",
    "load_model",
    "load_signal",
    "normalize",
    "parse_signal_csv",
    "save_labels",
    "save_model",
    "save_signal",
    "train",
]

try:
    from . import _tsgad as _impl
except ImportError:  # running from a build tree with the module on sys.path
    import _tsgad as _impl

globals().update({_name: getattr(_impl, _name) for _name in __all__})
del _impl
