"""Write plot-ready report files from a set of traces."""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import numpy as np

from ..optimizer import RegretTrace
from .ranking import RankTable, rank_methods, regret_matrix
from .traceio import write_trace

REPORT_HEADER = "# boostbo-report v1"


def _open(path: Path):
    f = path.open("w", newline="")
    f.write(f"{REPORT_HEADER} {path.stem}\n")
    return f, csv.writer(f, lineterminator="\n")


def _groups(traces):
    g: dict[tuple[str, str], list[RegretTrace]] = defaultdict(list)
    for t in traces:
        g[(t.task, t.method)].append(t)
    for v in g.values():
        v.sort(key=lambda t: t.trial_seed)
    return dict(sorted(g.items()))


def write_regret_curves(traces, path: Path) -> None:
    f, w = _open(path)
    with f:
        w.writerow(["task", "method", "eval", "mean_regret", "std_regret", "trials"])
        for (task, method), group in _groups(traces).items():
            r = regret_matrix(group)
            mean = r.mean(axis=0)
            std = r.std(axis=0, ddof=1) if len(group) > 1 else np.zeros_like(mean)
            for e in range(r.shape[1]):
                w.writerow([task, method, e + 1, repr(float(mean[e])), repr(float(std[e])), len(group)])


def write_rank_table(table: RankTable, path: Path) -> None:
    f, w = _open(path)
    with f:
        w.writerow(["# evaluation_count", table.evaluation_count])
        w.writerow(["method", "average_rank"] + [f"rank:{t}" for t in table.tasks]
                   + [f"regret:{t}" for t in table.tasks])
        for m in table.ordered_methods():
            ranks = [table.ranks.get((t, m), "") for t in table.tasks]
            regrets = [repr(table.mean_regret[(t, m)]) if (t, m) in table.mean_regret else ""
                       for t in table.tasks]
            w.writerow([m, repr(table.average_rank[m])] + ranks + regrets)


def write_selected_pairs(traces, path: Path) -> None:
    """One row per BO iteration of every BOOST-family run."""
    f, w = _open(path)
    with f:
        w.writerow(["task", "method", "trial_seed", "iteration", "pair"])
        for (task, method), group in _groups(traces).items():
            if not method.upper().startswith("BOOST"):
                continue
            for t in group:
                for i, p in enumerate(t.selected_pairs):
                    w.writerow([task, method, t.trial_seed, i + 1, p.name])


def write_runtime(traces, path: Path) -> None:
    f, w = _open(path)
    with f:
        w.writerow(["method", "runs", "iterations", "total_seconds_mean", "total_seconds_std",
                    "per_iteration_seconds_mean"])
        by_method: dict[str, list[RegretTrace]] = defaultdict(list)
        for t in traces:
            by_method[t.method].append(t)
        for m in sorted(by_method):
            group = by_method[m]
            totals = np.array([sum(t.wall_times) for t in group])
            n_iter = sum(len(t.wall_times) for t in group)
            per = totals.sum() / n_iter if n_iter else 0.0
            std = totals.std(ddof=1) if len(group) > 1 else 0.0
            w.writerow([m, len(group), n_iter, repr(float(totals.mean())), repr(float(std)),
                        repr(float(per))])


def emit_report(table: RankTable | None, traces: list[RegretTrace], out: str | Path,
                *, write_traces: bool = True) -> dict[str, Path]:
    """Write traces and summary files under ``out``; returns the paths by role."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    if table is None:
        table = rank_methods(traces)
    paths = {
        "regret_curves": out / "regret_curves.csv",
        "rank_table": out / "rank_table.csv",
        "selected_pairs": out / "selected_pairs.csv",
        "runtime": out / "runtime.csv",
    }
    if write_traces:
        tdir = out / "traces"
        for t in traces:
            write_trace(t, tdir)
        paths["traces"] = tdir
    write_regret_curves(traces, paths["regret_curves"])
    write_rank_table(table, paths["rank_table"])
    write_selected_pairs(traces, paths["selected_pairs"])
    write_runtime(traces, paths["runtime"])
    return paths
