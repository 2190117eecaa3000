"""Run (task, method, trial) jobs over a bounded worker pool."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from ..optimizer import RegretTrace, run_boost, run_fixed
from ..tasks import initial_design, read_table, standard_task
from .config import ConfigError, ExperimentConfig, parse_method, selector_config
from .traceio import write_trace

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Job:
    task_kind: str
    task_ref: str
    method: str
    trial: int  # 1-based; the trial uses seed trial - 1

    @property
    def seed(self) -> int:
        return self.trial - 1


@lru_cache(maxsize=8)
def load_task(kind: str, ref: str, dim: int = 4):
    if kind == "synthetic":
        return standard_task(ref, dim)
    return read_table(ref)


def run_job(job: Job, cfg: ExperimentConfig) -> RegretTrace:
    task = load_task(job.task_kind, job.task_ref, cfg.dim)
    init = initial_design(task, cfg.n_init, job.seed)
    kind, spec = parse_method(job.method, cfg)
    if kind == "fixed":
        return run_fixed(task, spec, init, cfg.iterations, job.seed,
                         candidate_cap=cfg.candidate_cap)
    scfg = selector_config(spec, cfg, task.optimum)
    return run_boost(task, scfg, init, cfg.iterations, job.seed,
                     candidate_cap=cfg.candidate_cap, method=job.method)


def _run_and_write(job: Job, cfg: ExperimentConfig, out: str) -> str:
    trace = run_job(job, cfg)
    path = write_trace(trace, out)
    log.info("%s %s seed=%d best=%.6g", trace.task, trace.method, trace.trial_seed,
             trace.best_so_far[-1])
    return str(path)


def plan(cfg: ExperimentConfig) -> list[Job]:
    return [
        Job(kind, ref, method, t)
        for kind, ref in cfg.task_specs()
        for method in cfg.methods
        for t in range(1, cfg.trials + 1)
    ]


def run_experiment(cfg: ExperimentConfig, trace_dir: str | Path | None = None) -> list[Path]:
    """Run every job and write one trace file per run; returns the paths."""
    cfg.validate()
    for kind, ref in cfg.task_specs():
        if kind == "table":
            try:
                load_task(kind, ref, cfg.dim)
            except (OSError, ValueError) as exc:
                raise ConfigError(f"cannot load table {ref}: {exc}") from exc
    out = Path(trace_dir) if trace_dir is not None else Path(cfg.out) / "traces"
    out.mkdir(parents=True, exist_ok=True)
    jobs = plan(cfg)
    if cfg.workers == 1:
        paths = [_run_and_write(j, cfg, str(out)) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            paths = list(pool.map(_run_and_write, jobs, [cfg] * len(jobs), [str(out)] * len(jobs)))
    return [Path(p) for p in paths]
