from __future__ import annotations

import numpy as np
import pytest

from boostbo.acquisition import acquisition_values
from boostbo.gp import fit_surrogate, predict_batch
from boostbo.optimizer import run_boost, run_fixed, simple_regret
from boostbo.selector import ALL_PAIRS, DEFAULT_PAIR, PairConfig, SelectorConfig, _derive_seed
from boostbo.tasks import DiscreteSearchSpace, SyntheticTask, even_axis, lhs_initial_design, standard_task


class CountingTask:
    """Wraps a task and counts calls to the true objective."""

    def __init__(self, task):
        self._task = task
        self.calls = 0

    def __getattr__(self, name):
        return getattr(self._task, name)

    def evaluate(self, index):
        self.calls += 1
        return self._task.evaluate(index)


def toy_task():
    return SyntheticTask("sumsquares", DiscreteSearchSpace([even_axis(-2.0, 2.0, 5)]), name="toy")


def test_zero_iterations_returns_initial_design_only():
    task = standard_task("sumsquares")
    init = lhs_initial_design(task.space, 5, seed=0)
    tr = run_fixed(task, DEFAULT_PAIR, init, 0)
    assert tr.n_init == 5 and tr.n_iterations == 0
    assert len(tr.best_so_far) == 5
    assert tr.values == [task.evaluate(task.index_of(p)) for p in init]


def test_fixed_run_matches_replay_on_toy_task():
    task = toy_task()
    init = np.array([[-2.0], [2.0]])
    pair = PairConfig.from_name("Matern52_EI")
    tr = run_fixed(task, pair, init, 3, seed=4)

    # replay: fit on observed, score remaining nodes, take first maximum
    cand = task.candidate_inputs()
    obs = [task.index_of(p) for p in init]
    for it in range(3):
        s = fit_surrogate(pair.kernel, cand[obs], [task.evaluate(i) for i in obs],
                          seed=_derive_seed(4, it))
        free = [i for i in range(task.size) if i not in obs]
        mu, var = predict_batch(s, cand[free])
        sc = acquisition_values(pair.acquisition, mu, np.sqrt(var), min(task.evaluate(i) for i in obs))
        obs.append(free[int(np.argmax(sc))])
    assert tr.indices == obs
    assert tr.best_so_far == list(np.minimum.accumulate([task.evaluate(i) for i in obs]))


def test_exhaustion_pads_trace():
    task = toy_task()
    tr = run_fixed(task, DEFAULT_PAIR, np.array([[-2.0], [0.0]]), 6)
    assert len(tr.values) == 5
    assert len(tr.best_so_far) == 8
    assert tr.exhausted_at == 5
    assert tr.best_so_far[-1] == 0.0
    assert len(tr.selected_pairs) == 6


def test_init_validation():
    task = toy_task()
    with pytest.raises(ValueError, match="repeats"):
        run_fixed(task, DEFAULT_PAIR, np.array([[0.0], [0.0]]), 1)
    with pytest.raises(ValueError, match="two"):
        run_fixed(task, DEFAULT_PAIR, np.array([[0.0]]), 1)
    with pytest.raises(ValueError):
        run_fixed(task, DEFAULT_PAIR, np.array([[0.3]]), 1)
    with pytest.raises(ValueError):
        run_fixed(task, DEFAULT_PAIR, np.array([[0.0], [1.0]]), -1)


def test_single_pair_boost_equals_fixed():
    task = standard_task("levy")
    init = lhs_initial_design(task.space, 6, seed=2)
    pair = ALL_PAIRS[6]
    fixed = run_fixed(task, pair, init, 4, seed=2)
    boost = run_boost(task, SelectorConfig(pairs=(pair,)), init, 4, seed=2)
    assert boost.indices == fixed.indices
    assert boost.selected_pairs == [pair] * 4


def test_boost_evaluation_count_and_determinism():
    base = standard_task("sumsquares")
    task = CountingTask(base)
    init = lhs_initial_design(base.space, 6, seed=0)
    a = run_boost(task, SelectorConfig(), init, 4, seed=0)
    assert task.calls == 6 + 4
    assert len(a.selected_pairs) == 4
    b = run_boost(base, SelectorConfig(), init, 4, seed=0)
    assert a.same_numbers(b)


def test_boost_with_three_points_uses_default_pair():
    task = toy_task()
    tr = run_boost(task, SelectorConfig(), np.array([[-2.0], [2.0]]), 2, seed=0)
    assert tr.selected_pairs == [DEFAULT_PAIR, DEFAULT_PAIR]


def test_candidate_cap_is_reproducible():
    task = standard_task("rosenbrock")
    init = lhs_initial_design(task.space, 5, seed=1)
    a = run_fixed(task, DEFAULT_PAIR, init, 3, seed=1, candidate_cap=500)
    b = run_fixed(task, DEFAULT_PAIR, init, 3, seed=1, candidate_cap=500)
    assert a.same_numbers(b)
    assert a.candidate_cap == 500


def test_simple_regret_monotone_and_nonnegative():
    task = standard_task("sumsquares")
    tr = run_fixed(task, DEFAULT_PAIR, lhs_initial_design(task.space, 5, seed=3), 5, seed=3)
    r = simple_regret(tr, task.optimum)
    assert np.all(np.diff(r) <= 0) and np.all(r >= 0)
    assert tr.optimum == 0.0
