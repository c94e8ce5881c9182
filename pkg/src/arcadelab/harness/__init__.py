"""Experiment configuration, execution and reporting."""

from .config import AGENTS, OVERRIDE_DEFAULTS, ExperimentConfig, load_config, parse_config_text
from .preprocess import PreprocessingMissing, build_preprocessing, demo_action, load_models, model_path, sample_screens
from .report import SplitMixError, make_report
from .runner import RunRecord, baseline_configs, load_records, run_experiment, run_trial

__all__ = [
    "AGENTS", "OVERRIDE_DEFAULTS", "ExperimentConfig", "load_config", "parse_config_text",
    "PreprocessingMissing", "build_preprocessing", "demo_action", "load_models", "model_path", "sample_screens",
    "SplitMixError", "make_report",
    "RunRecord", "baseline_configs", "load_records", "run_experiment", "run_trial",
]
