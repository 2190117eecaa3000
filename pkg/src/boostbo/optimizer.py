"""Outer BO loops over a discrete task: fixed pair or per-iteration selection."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .acquisition import acquisition_scores
from .gp import fit_surrogate
from .observations import ObservationSet
from .selector import DEFAULT_PAIR, PairConfig, SelectorConfig, _derive_seed, recommend

__all__ = ["ObservationSet", "RegretTrace", "run_fixed", "run_boost", "simple_regret"]


@dataclass(eq=False)
class RegretTrace:
    """One trial: every evaluation in order plus the pair used at each BO step."""

    task: str
    method: str
    trial_seed: int
    n_init: int
    indices: list[int]
    values: list[float]
    best_so_far: list[float]
    selected_pairs: list[PairConfig]
    wall_times: list[float] = field(default_factory=list)
    candidate_cap: int | None = None
    exhausted_at: int | None = None  # evaluation count when candidates ran out
    optimum: float | None = None

    @property
    def n_iterations(self) -> int:
        return len(self.selected_pairs)

    def same_numbers(self, other: "RegretTrace") -> bool:
        """Equality of everything except wall-clock fields."""
        return (
            self.task == other.task
            and self.method == other.method
            and self.trial_seed == other.trial_seed
            and self.n_init == other.n_init
            and self.indices == other.indices
            and self.values == other.values
            and self.best_so_far == other.best_so_far
            and self.selected_pairs == other.selected_pairs
            and self.candidate_cap == other.candidate_cap
            and self.exhausted_at == other.exhausted_at
            and self.optimum == other.optimum
        )


PairChooser = Callable[[ObservationSet, int], PairConfig]


def _run(task, init, iters: int, seed: int, chooser: PairChooser, method: str,
         candidate_cap: int | None) -> RegretTrace:
    if iters < 0:
        raise ValueError("iters must be >= 0")
    cand = task.candidate_inputs()
    n_cand = cand.shape[0]
    observed = np.zeros(n_cand, dtype=bool)
    indices: list[int] = []
    for x in np.atleast_2d(np.asarray(init, dtype=np.float64)):
        i = task.index_of(x)
        if observed[i]:
            raise ValueError(f"initial design repeats point {x}")
        observed[i] = True
        indices.append(i)
    if iters > 0 and len(indices) < 2:
        raise ValueError("need at least two initial points to fit a surrogate")
    values = [task.evaluate(i) for i in indices]
    best = list(np.minimum.accumulate(values)) if values else []
    trace = RegretTrace(
        task=getattr(task, "name", "task"), method=method, trial_seed=seed, n_init=len(indices),
        indices=indices, values=values, best_so_far=[float(b) for b in best],
        selected_pairs=[], candidate_cap=candidate_cap,
        optimum=float(task.optimum) if getattr(task, "optimum", None) is not None else None,
    )
    data = ObservationSet(cand[indices], values)

    for it in range(iters):
        t0 = time.perf_counter()
        pair = chooser(data, it)
        trace.selected_pairs.append(pair)
        free = np.flatnonzero(~observed)
        if free.size == 0:
            # pad so every trace has the same length
            if trace.exhausted_at is None:
                trace.exhausted_at = len(trace.values)
            trace.best_so_far.append(trace.best_so_far[-1])
            trace.wall_times.append(time.perf_counter() - t0)
            continue
        if candidate_cap is not None and free.size > candidate_cap:
            rng = np.random.default_rng(_derive_seed(seed, it, 0xCA9))
            free = np.sort(rng.choice(free, size=candidate_cap, replace=False))
        surrogate = fit_surrogate(pair.kernel, data.inputs, data.values, seed=_derive_seed(seed, it))
        if candidate_cap is None:
            # scanning the whole matrix avoids copying it; observed rows are dropped after
            scores = acquisition_scores(pair.acquisition, surrogate, cand, data.best_value)[free]
        else:
            scores = acquisition_scores(pair.acquisition, surrogate, cand[free], data.best_value)
        nxt = int(free[int(np.argmax(scores))])
        y = task.evaluate(nxt)
        observed[nxt] = True
        data = data.append(cand[nxt], y)
        trace.indices.append(nxt)
        trace.values.append(y)
        trace.best_so_far.append(min(trace.best_so_far[-1], y) if trace.best_so_far else y)
        trace.wall_times.append(time.perf_counter() - t0)
    return trace


def run_fixed(task, pair: PairConfig, init, iters: int, seed: int = 0, *,
              candidate_cap: int | None = None) -> RegretTrace:
    """BO with one kernel/acquisition pair for every iteration."""
    return _run(task, init, iters, seed, lambda data, it: pair, pair.name, candidate_cap)


def run_boost(task, cfg: SelectorConfig = SelectorConfig(), init=(), iters: int = 0,
              seed: int = 0, *, candidate_cap: int | None = None, method: str = "BOOST") -> RegretTrace:
    """BO that re-selects the pair from the data-in-hand before each step.

    With fewer than four observations the selector cannot partition, so
    the priority default (Matern 3/2 + EI) is used.
    """

    def chooser(data: ObservationSet, it: int) -> PairConfig:
        if len(data) < 4:
            return DEFAULT_PAIR
        return recommend(data, cfg, seed=_derive_seed(seed, it))

    return _run(task, init, iters, seed, chooser, method, candidate_cap)


def simple_regret(trace: RegretTrace, optimum: float) -> np.ndarray:
    return np.asarray(trace.best_so_far, dtype=np.float64) - optimum
