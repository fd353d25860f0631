"""Benchmark harness: experiment configs, the runner, and report emitters."""

from .config import ExperimentConfig
from .report import (ReferenceRow, emit_comparison_table, load_reference_constants,
                     read_results_csv, write_results_csv, write_spectrum_csv)
from .runner import ResultRow, SpectrumRow, emit_variance_spectrum, run_experiment

__all__ = [
    "ExperimentConfig",
    "ReferenceRow",
    "ResultRow",
    "SpectrumRow",
    "emit_comparison_table",
    "emit_variance_spectrum",
    "load_reference_constants",
    "read_results_csv",
    "run_experiment",
    "write_results_csv",
    "write_spectrum_csv",
]
