"""Rank methods per task by mean simple regret."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from ..optimizer import RegretTrace


@dataclass(frozen=True)
class RankTable:
    tasks: tuple[str, ...]
    methods: tuple[str, ...]
    evaluation_count: int
    mean_regret: dict[tuple[str, str], float]  # at evaluation_count
    ranks: dict[tuple[str, str], int]
    average_rank: dict[str, float]

    def ordered_methods(self) -> list[str]:
        return sorted(self.methods, key=lambda m: (self.average_rank[m], m))


def regret_matrix(traces: list[RegretTrace]) -> np.ndarray:
    """Simple regret per trial (rows) and evaluation (columns)."""
    rows = []
    for t in traces:
        if t.optimum is None:
            raise ValueError(f"trace {t.task}/{t.method} has no optimum")
        rows.append(np.asarray(t.best_so_far, dtype=np.float64) - t.optimum)
    return np.vstack(rows)


def mean_regret_curves(traces: list[RegretTrace]) -> dict[tuple[str, str], np.ndarray]:
    groups: dict[tuple[str, str], list[RegretTrace]] = defaultdict(list)
    for t in traces:
        groups[(t.task, t.method)].append(t)
    out = {}
    for key, group in groups.items():
        group.sort(key=lambda t: t.trial_seed)
        out[key] = regret_matrix(group).mean(axis=0)
    return out


def rank_methods(traces: list[RegretTrace], evaluation_index: int | None = None) -> RankTable:
    """Rank by mean regret after ``evaluation_index`` evaluations (default: all).

    Ties are broken by the mean regret one evaluation earlier, recursing
    back to the first evaluation; methods still tied share the lowest rank.
    """
    if not traces:
        raise ValueError("no traces")
    lengths = {len(t.best_so_far) for t in traces}
    if len(lengths) != 1:
        raise ValueError(f"traces differ in length: {sorted(lengths)}")
    length = lengths.pop()
    n = length if evaluation_index is None else int(evaluation_index)
    if not 1 <= n <= length:
        raise ValueError(f"evaluation_index must lie in 1..{length}")

    curves = mean_regret_curves(traces)
    tasks = tuple(sorted({k[0] for k in curves}))
    methods = tuple(sorted({k[1] for k in curves}))
    ranks: dict[tuple[str, str], int] = {}
    mean_regret: dict[tuple[str, str], float] = {}
    for task in tasks:
        present = [m for m in methods if (task, m) in curves]
        keys = {m: tuple(curves[(task, m)][n - 1 :: -1]) for m in present}
        for m in present:
            mean_regret[(task, m)] = float(curves[(task, m)][n - 1])
            ranks[(task, m)] = 1 + sum(keys[o] < keys[m] for o in present)
    average = {}
    for m in methods:
        rs = [ranks[(t, m)] for t in tasks if (t, m) in ranks]
        average[m] = float(np.mean(rs))
    return RankTable(tasks, methods, n, mean_regret, ranks, average)
