from __future__ import annotations

import csv
import json
import random

import numpy as np
import pytest

from boostbo.cli import main
from boostbo.harness import (
    ConfigError,
    ExperimentConfig,
    ablation_methods,
    emit_report,
    parse_method,
    parse_trace,
    plan,
    rank_methods,
    read_traces,
    run_experiment,
)
from boostbo.harness.traceio import format_trace, trace_filename
from boostbo.optimizer import RegretTrace
from boostbo.selector import ALL_PAIRS, DEFAULT_PAIR, PairConfig
from oracles import recursive_tie_rank

SMALL = dict(tasks=["sumsquares"], methods=["BOOST", "Matern52_EI"], n_init=4, iterations=2, trials=2)


def fake_trace(task, method, seed, best, optimum=0.0, n_init=1):
    n_bo = len(best) - n_init
    pairs = [DEFAULT_PAIR] * n_bo
    return RegretTrace(task, method, seed, n_init, list(range(len(best))), list(best), list(best),
                       pairs, [0.1] * n_bo, optimum=optimum)


def rows(path):
    with open(path) as f:
        return [r for r in csv.reader(f) if r and not r[0].startswith("#")]


def test_trace_round_trip():
    tr = RegretTrace("levy", "BOOST", 3, 2, [5, 9, 1], [0.5, 0.25, 1.0 / 3], [0.5, 0.25, 0.25, 0.25],
                     [ALL_PAIRS[4], ALL_PAIRS[9]], [0.1, 0.2], candidate_cap=None, exhausted_at=3,
                     optimum=0.125)
    back = parse_trace(format_trace(tr))
    assert back.same_numbers(tr)
    assert format_trace(back) == format_trace(tr)


def test_trace_requires_header():
    with pytest.raises(ValueError, match="header"):
        parse_trace("eval,kind\n")


def test_rank_final_tie_resolved_by_previous_index():
    a = fake_trace("t", "A", 0, [1.0, 0.5, 0.1])
    b = fake_trace("t", "B", 0, [1.0, 0.2, 0.1])
    table = rank_methods([a, b])
    assert table.ranks[("t", "B")] == 1 and table.ranks[("t", "A")] == 2


def test_rank_distinct_final_regret_is_sort_order():
    traces = [fake_trace("t", m, 0, [5.0, v]) for m, v in zip("ABCD", [0.3, 0.1, 0.4, 0.2])]
    table = rank_methods(traces)
    assert [table.ranks[("t", m)] for m in "ABCD"] == [3, 1, 4, 2]


def test_rank_matches_brute_force_oracle():
    rng = np.random.default_rng(0)
    for _ in range(30):
        traces, curves = [], {}
        for task in ("t1", "t2"):
            for m in ("A", "B", "C"):
                # coarse values so ties occur often
                c = list(np.minimum.accumulate(rng.integers(0, 3, 4).astype(float)))
                curves[(task, m)] = c
                traces.append(fake_trace(task, m, 0, c))
        idx = int(rng.integers(1, 5))
        table = rank_methods(traces, idx)
        for m in ("A", "B", "C"):
            want = np.mean([recursive_tie_rank({k[1]: v for k, v in curves.items() if k[0] == t},
                                               idx)[m] for t in ("t1", "t2")])
            assert table.average_rank[m] == pytest.approx(want)


def test_rank_mean_over_trials_and_invariant_to_order():
    traces = [fake_trace("t", "A", 0, [1.0, 0.4]), fake_trace("t", "A", 1, [1.0, 0.0]),
              fake_trace("t", "B", 0, [1.0, 0.3]), fake_trace("t", "B", 1, [1.0, 0.3])]
    table = rank_methods(traces)
    assert table.mean_regret[("t", "A")] == pytest.approx(0.2)
    assert table.ranks[("t", "A")] == 1
    shuffled = traces[:]
    random.Random(1).shuffle(shuffled)
    assert rank_methods(shuffled).ranks == table.ranks


def test_rank_errors():
    with pytest.raises(ValueError, match="length"):
        rank_methods([fake_trace("t", "A", 0, [1.0, 0.5]), fake_trace("t", "B", 0, [1.0])])
    with pytest.raises(ValueError):
        rank_methods([fake_trace("t", "A", 0, [1.0])], 2)


def test_plan_sizes_and_seeds():
    cfg = ExperimentConfig(tasks=["ackley", "levy", "rosenbrock", "sumsquares"])
    jobs = plan(cfg)
    assert len(cfg.methods) == 17
    assert len(jobs) == 17 * 4 * 10 == 680
    assert sorted({j.seed for j in jobs}) == list(range(10))


def test_config_errors_before_running(tmp_path):
    with pytest.raises(ConfigError, match="unknown task"):
        run_experiment(ExperimentConfig(tasks=["branin"]), tmp_path)
    with pytest.raises(ConfigError, match="not found"):
        run_experiment(ExperimentConfig(tables=[str(tmp_path / "nope.csv")]), tmp_path)
    with pytest.raises(ConfigError):
        ExperimentConfig(tasks=["levy"], trials=0).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(tasks=["levy"], iterations=-1).validate()
    with pytest.raises(ConfigError, match="unknown method"):
        ExperimentConfig(tasks=["levy"], methods=["GP_UCB"]).validate()
    with pytest.raises(ConfigError, match="unknown config keys"):
        ExperimentConfig.from_dict({"task": ["levy"]})
    assert list(tmp_path.iterdir()) == []


def test_parse_method_variants():
    cfg = ExperimentConfig()
    assert parse_method("RBF_PI", cfg) == ("fixed", PairConfig.from_name("RBF_PI"))
    kind, s = parse_method("BOOST[partition=random,ratio_divisor=5]", cfg)
    assert kind == "boost" and s["partition"] == "random" and s["ratio_divisor"] == 5
    assert s["tie_break"] == "priority"
    with pytest.raises(ConfigError):
        parse_method("BOOST[colour=red]", cfg)
    assert ablation_methods("ratio") == [f"BOOST[ratio_divisor={d}]" for d in (2, 3, 4, 5)]
    with pytest.raises(ConfigError):
        ablation_methods("kernels")


def test_run_experiment_deterministic_and_worker_independent(tmp_path):
    cfg = ExperimentConfig(**SMALL)
    a = run_experiment(cfg, tmp_path / "a")
    b = run_experiment(ExperimentConfig(**SMALL, workers=2), tmp_path / "b")
    assert len(a) == 4
    for pa, pb in zip(sorted(a), sorted(b)):
        assert pa.name == pb.name
        assert pa.read_bytes() == pb.read_bytes()


def test_report_files(tmp_path):
    cfg = ExperimentConfig(**SMALL)
    run_experiment(cfg, tmp_path / "traces")
    traces = read_traces(tmp_path / "traces")
    paths = emit_report(rank_methods(traces), traces, tmp_path / "rep")
    curves = rows(paths["regret_curves"])
    assert len(curves) - 1 == 2 * (4 + 2)  # two methods, n_init + iterations rows each
    pairs = rows(paths["selected_pairs"])
    assert len(pairs) - 1 == 2 * 2  # two BOOST trials, two iterations each
    runtime = {r[0]: r for r in rows(paths["runtime"])[1:]}
    assert set(runtime) == {"BOOST", "Matern52_EI"}
    assert float(runtime["BOOST"][3]) > 0 and float(runtime["BOOST"][5]) > 0
    for p in ("regret_curves", "rank_table", "selected_pairs", "runtime"):
        assert paths[p].read_text().startswith("# boostbo-report v1")
    assert len(list(paths["traces"].glob("*__seed*.csv"))) == 8  # traces plus timing sidecars


def test_report_unwritable_directory(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        emit_report(None, [fake_trace("t", "A", 0, [1.0, 0.5])], blocker / "sub")


def test_cli_run_rank_report(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", "--task", "sumsquares", "--methods", "BOOST,RBF_EI", "--trials", "1",
                 "--iters", "1", "--init", "4", "--out", str(out)]) == 0
    assert "avg rank" in capsys.readouterr().out
    assert main(["rank", "--traces", str(out / "traces"), "--at", "5"]) == 0
    assert "ranks after 5 evaluations" in capsys.readouterr().out
    assert main(["report", "--traces", str(out / "traces"), "--out", str(tmp_path / "rep")]) == 0
    assert (tmp_path / "rep" / "rank_table.csv").exists()


def test_cli_config_file_and_errors(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({**SMALL, "methods": ["PM_x"]}))
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "configuration error" in capsys.readouterr().err
    cfg.write_text(json.dumps({**SMALL, "trials": 1, "iterations": 1}))
    assert main(["run", "--config", str(cfg), "--methods", "RQ_PM", "--out", str(tmp_path / "o")]) == 0
    names = sorted(p.name for p in (tmp_path / "o" / "traces").glob("*.csv"))
    assert names == ["sumsquares__RQ_PM__seed000.csv", "sumsquares__RQ_PM__seed000.timing.csv"]


def test_cli_ablate(tmp_path, capsys):
    assert main(["ablate", "--study", "partition", "--task", "sumsquares", "--trials", "1",
                 "--iters", "1", "--init", "4", "--out", str(tmp_path / "ab")]) == 0
    text = capsys.readouterr().out
    assert "BOOST[partition=kmeans]" in text and "BOOST[partition=random]" in text


def test_trace_filename_slug():
    tr = fake_trace("levy", "BOOST[partition=random]", 7, [1.0])
    assert trace_filename(tr) == "levy__BOOST-partition=random__seed007.csv"
