from .config import ConfigError, ExperimentConfig, build_config
from .curves import CurveError, emit_curves
from .datasets import REGISTRY, load_benchmark
from .experiment import Cell, MetricReport, fit_single, run_experiment
from .persist import ModelFormatError, ModelVersionError, load_model, read_model_file, save_model

__all__ = [
    "Cell",
    "ConfigError",
    "CurveError",
    "ExperimentConfig",
    "MetricReport",
    "ModelFormatError",
    "ModelVersionError",
    "REGISTRY",
    "build_config",
    "emit_curves",
    "fit_single",
    "load_benchmark",
    "load_model",
    "read_model_file",
    "run_experiment",
    "save_model",
]
