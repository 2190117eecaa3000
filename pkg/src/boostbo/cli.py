"""``boostbo`` command line: run experiments, rank traces, write reports."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .harness.config import ABLATIONS, ConfigError, ExperimentConfig, ablation_methods, with_overrides
from .harness.ranking import rank_methods
from .harness.report import emit_report
from .harness.runner import run_experiment
from .harness.traceio import read_traces


def _csv_list(s: str) -> list[str]:
    return [p.strip() for p in s.split(",") if p.strip()]


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with ExperimentConfig fields")
    p.add_argument("--task", action="append", help="synthetic task name (repeatable)")
    p.add_argument("--table", action="append", type=str, help="tabular task CSV (repeatable)")
    p.add_argument("--methods", type=_csv_list, help="comma-separated, e.g. BOOST,Matern52_EI")
    p.add_argument("--trials", type=int)
    p.add_argument("--iters", type=int, dest="iterations")
    p.add_argument("--init", type=int, dest="n_init")
    p.add_argument("--dim", type=int)
    p.add_argument("--workers", type=int, help="parallel (task, method, trial) jobs")
    p.add_argument("--pair-workers", type=int, help="threads for the 16 internal pair runs")
    p.add_argument("--candidate-cap", type=int)
    p.add_argument("--out", type=str)
    p.add_argument("--partition", choices=["kmeans", "random"])
    p.add_argument("--ratio-divisor", type=int)
    p.add_argument("--percentile", type=float)
    p.add_argument("--tie-break", choices=["priority", "random"])
    p.add_argument("--target-mode", choices=["percentile", "optimum"])
    p.add_argument("--t-max", type=int)


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    return with_overrides(
        cfg,
        tasks=args.task, tables=args.table, methods=args.methods, trials=args.trials,
        iterations=args.iterations, n_init=args.n_init, dim=args.dim, workers=args.workers,
        pair_workers=args.pair_workers, candidate_cap=args.candidate_cap, out=args.out,
        partition=args.partition, ratio_divisor=args.ratio_divisor, percentile=args.percentile,
        tie_break=args.tie_break, target_mode=args.target_mode, t_max=args.t_max,
    )


def _print_table(table, stream=None) -> None:
    stream = stream or sys.stdout
    head = f"{'method':<34}{'avg rank':>9}" + "".join(f"{t:>14}" for t in table.tasks)
    print(f"ranks after {table.evaluation_count} evaluations", file=stream)
    print(head, file=stream)
    for m in table.ordered_methods():
        cells = "".join(f"{table.ranks.get((t, m), '-'):>14}" for t in table.tasks)
        print(f"{m:<34}{table.average_rank[m]:>9.2f}{cells}", file=stream)


def _run_and_report(cfg: ExperimentConfig) -> int:
    out = Path(cfg.out)
    run_experiment(cfg, out / "traces")
    traces = read_traces(out / "traces")
    table = rank_methods(traces)
    emit_report(table, traces, out, write_traces=False)
    _print_table(table)
    return 0


def cmd_run(args) -> int:
    return _run_and_report(_config(args))


def cmd_ablate(args) -> int:
    cfg = _config(args)
    keep = [m for m in (args.methods or []) if not m.upper().startswith("BOOST")]
    methods = ablation_methods(args.study) + keep
    cfg = with_overrides(cfg, methods=methods)
    if args.out is None:
        cfg = with_overrides(cfg, out=str(Path(cfg.out) / f"ablate-{args.study}"))
    return _run_and_report(cfg)


def cmd_rank(args) -> int:
    table = rank_methods(read_traces(args.traces), args.at)
    _print_table(table)
    return 0


def cmd_report(args) -> int:
    traces = read_traces(args.traces)
    table = rank_methods(traces, args.at)
    same_dir = (args.out / "traces").resolve() == args.traces.resolve()
    paths = emit_report(table, traces, args.out, write_traces=not same_dir)
    for role, p in paths.items():
        print(f"{role}: {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="boostbo", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment and write traces plus a report")
    _add_run_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("ablate", help="run a BOOST ablation study")
    p.add_argument("--study", required=True, choices=sorted(ABLATIONS))
    _add_run_flags(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("rank", help="rank methods from a trace directory")
    p.add_argument("--traces", required=True, type=Path)
    p.add_argument("--at", type=int, help="evaluation count to rank at (default: last)")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("report", help="write report files from a trace directory")
    p.add_argument("--traces", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--at", type=int)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"boostbo: configuration error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"boostbo: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
