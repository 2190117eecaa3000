"""Bayesian optimization with per-iteration kernel and acquisition selection."""

from __future__ import annotations

from ._backend import NAME as BACKEND
from .acquisition import AcquisitionFamily, AcquisitionSpec, acquisition_value, select_next
from .gp import GPHyperparams, KernelFamily, KernelSpec, TrainedSurrogate, fit_surrogate, predict
from .observations import ObservationSet
from .optimizer import RegretTrace, run_boost, run_fixed
from .partition import PartitionConfig, PartitionStrategy, make_partition
from .selector import ALL_PAIRS, PairConfig, SelectorConfig, TieBreak, internal_bo_run, recommend
from .tasks import SyntheticTask, TabularTask, load_tabular, standard_task

__version__ = "0.1.0"

__all__ = [
    "ALL_PAIRS", "AcquisitionFamily", "AcquisitionSpec", "BACKEND", "GPHyperparams",
    "KernelFamily", "KernelSpec", "ObservationSet", "PairConfig", "PartitionConfig",
    "PartitionStrategy", "RegretTrace", "SelectorConfig", "SyntheticTask", "TabularTask",
    "TieBreak", "TrainedSurrogate", "acquisition_value", "fit_surrogate", "internal_bo_run",
    "load_tabular", "make_partition", "predict", "recommend", "run_boost", "run_fixed",
    "select_next", "standard_task",
]
