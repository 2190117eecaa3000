"""Versioned delimited-text format for regret traces.

A trace file holds every evaluation of one run; wall-clock durations go
to a sidecar ``.timing.csv`` so the trace itself is byte-reproducible.
"""

from __future__ import annotations

import csv
import io
import re
from pathlib import Path

from ..optimizer import RegretTrace
from ..selector import PairConfig

TRACE_HEADER = "# boostbo-trace v1"
TIMING_HEADER = "# boostbo-timing v1"
_META_KEYS = ("task", "method", "trial_seed", "n_init", "candidate_cap", "exhausted_at", "optimum")


def _fmt_opt(v) -> str:
    return "none" if v is None else repr(v)


def _parse_opt(s: str, kind):
    return None if s == "none" else kind(s)


def trace_filename(trace: RegretTrace) -> str:
    slug = re.sub(r"[^A-Za-z0-9_.=+-]+", "-", trace.method).strip("-")
    return f"{trace.task}__{slug}__seed{trace.trial_seed:03d}.csv"


def format_trace(trace: RegretTrace) -> str:
    buf = io.StringIO()
    buf.write(TRACE_HEADER + "\n")
    meta = {
        "task": trace.task,
        "method": trace.method,
        "trial_seed": str(trace.trial_seed),
        "n_init": str(trace.n_init),
        "candidate_cap": _fmt_opt(trace.candidate_cap),
        "exhausted_at": _fmt_opt(trace.exhausted_at),
        "optimum": _fmt_opt(trace.optimum),
    }
    for k in _META_KEYS:
        buf.write(f"# {k}={meta[k]}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eval", "kind", "index", "value", "best_so_far", "pair"])
    n_vals = len(trace.values)
    for e, best in enumerate(trace.best_so_far):
        if e < trace.n_init:
            kind, pair = "init", ""
        else:
            kind, pair = "bo", trace.selected_pairs[e - trace.n_init].name
        if e < n_vals:
            w.writerow([e + 1, kind, trace.indices[e], repr(trace.values[e]), repr(best), pair])
        else:
            w.writerow([e + 1, "pad", "", "", repr(best), pair])
    return buf.getvalue()


def format_timing(trace: RegretTrace) -> str:
    lines = [TIMING_HEADER, "iteration,seconds"]
    lines += [f"{i + 1},{t!r}" for i, t in enumerate(trace.wall_times)]
    return "\n".join(lines) + "\n"


def write_trace(trace: RegretTrace, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / trace_filename(trace)
    path.write_text(format_trace(trace))
    path.with_suffix(".timing.csv").write_text(format_timing(trace))
    return path


def parse_trace(text: str, timing: str | None = None) -> RegretTrace:
    lines = text.splitlines()
    if not lines or lines[0].strip() != TRACE_HEADER:
        raise ValueError("not a boostbo trace (missing version header)")
    meta = {}
    body_start = 1
    for i, line in enumerate(lines[1:], start=1):
        if not line.startswith("# "):
            body_start = i
            break
        k, _, v = line[2:].partition("=")
        meta[k] = v
    missing = [k for k in _META_KEYS if k not in meta]
    if missing:
        raise ValueError(f"trace header lacks {missing}")
    rows = list(csv.DictReader(lines[body_start:]))
    indices, values, best, pairs = [], [], [], []
    for r in rows:
        best.append(float(r["best_so_far"]))
        if r["kind"] != "pad":
            indices.append(int(r["index"]))
            values.append(float(r["value"]))
        if r["kind"] != "init":
            pairs.append(PairConfig.from_name(r["pair"]))
    wall = []
    if timing is not None:
        tl = timing.splitlines()
        if not tl or tl[0].strip() != TIMING_HEADER:
            raise ValueError("not a boostbo timing file")
        wall = [float(r["seconds"]) for r in csv.DictReader(tl[1:])]
    return RegretTrace(
        task=meta["task"],
        method=meta["method"],
        trial_seed=int(meta["trial_seed"]),
        n_init=int(meta["n_init"]),
        indices=indices,
        values=values,
        best_so_far=best,
        selected_pairs=pairs,
        wall_times=wall,
        candidate_cap=_parse_opt(meta["candidate_cap"], int),
        exhausted_at=_parse_opt(meta["exhausted_at"], int),
        optimum=_parse_opt(meta["optimum"], float),
    )


def read_trace(path: str | Path) -> RegretTrace:
    path = Path(path)
    tpath = path.with_suffix(".timing.csv")
    timing = tpath.read_text() if tpath.exists() else None
    return parse_trace(path.read_text(), timing)


def read_traces(directory: str | Path) -> list[RegretTrace]:
    directory = Path(directory)
    paths = sorted(p for p in directory.glob("*.csv") if not p.name.endswith(".timing.csv"))
    if not paths:
        raise FileNotFoundError(f"no trace files in {directory}")
    return [read_trace(p) for p in paths]
