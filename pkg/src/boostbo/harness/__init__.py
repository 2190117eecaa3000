"""Experiment harness: configuration, execution, ranking and reports."""

from __future__ import annotations

from .config import ConfigError, ExperimentConfig, ablation_methods, parse_method
from .ranking import RankTable, rank_methods
from .report import emit_report
from .runner import Job, plan, run_experiment
from .traceio import parse_trace, read_trace, read_traces, write_trace

__all__ = [
    "ConfigError", "ExperimentConfig", "Job", "RankTable", "ablation_methods", "emit_report",
    "parse_method", "parse_trace", "plan", "rank_methods", "read_trace", "read_traces",
    "run_experiment", "write_trace",
]
