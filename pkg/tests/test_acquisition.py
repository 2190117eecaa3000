from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boostbo.acquisition import (
    AcquisitionFamily,
    AcquisitionSpec,
    acquisition_scores,
    acquisition_value,
    acquisition_values,
    select_next,
)
from boostbo.gp import GPHyperparams, KernelFamily, KernelSpec, condition
from oracles import mp_ei, mp_pi

EI = AcquisitionSpec(AcquisitionFamily.EI)
PI = AcquisitionSpec(AcquisitionFamily.PI)
LCB = AcquisitionSpec(AcquisitionFamily.LCB)
PM = AcquisitionSpec(AcquisitionFamily.PM)


def test_closed_forms_match_quadrature():
    rng = np.random.default_rng(7)
    for _ in range(30):
        mu, sigma, f = rng.normal(0, 2), rng.uniform(0.01, 3), rng.normal(0, 2)
        assert acquisition_value(EI, mu, sigma, f) == pytest.approx(float(mp_ei(mu, sigma, f)), abs=1e-6)
        assert acquisition_value(PI, mu, sigma, f) == pytest.approx(float(mp_pi(mu, sigma, f)), abs=1e-6)


def test_zero_sigma_limits_are_exact():
    assert acquisition_value(EI, 1.0, 0.0, 3.0) == 2.0
    assert acquisition_value(EI, 3.0, 0.0, 1.0) == 0.0
    assert acquisition_value(PI, 1.0, 0.0, 3.0) == 1.0
    assert acquisition_value(PI, 3.0, 0.0, 3.0) == 0.0
    assert acquisition_value(LCB, 2.0, 0.0, 0.0) == -2.0


def test_lcb_and_pm_values():
    assert acquisition_value(LCB, 1.0, 2.0, 0.0) == pytest.approx(-(1.0 - 0.1 * 2.0))
    assert acquisition_value(PM, 1.5, 9.0, 0.0) == -1.5


def test_negative_sigma_rejected():
    with pytest.raises(ValueError):
        acquisition_value(EI, 0.0, -1.0, 0.0)
    with pytest.raises(ValueError):
        AcquisitionSpec(AcquisitionFamily.LCB, beta=-1.0)


def test_names_round_trip():
    for fam in AcquisitionFamily:
        assert AcquisitionSpec.from_name(AcquisitionSpec(fam).name.lower()).family is fam
    with pytest.raises(ValueError):
        AcquisitionSpec.from_name("UCB")


@settings(max_examples=200, deadline=None)
@given(mu=st.floats(-50, 50), sigma=st.floats(0, 20), f=st.floats(-50, 50))
def test_ei_nonnegative_and_dominates_improvement(mu, sigma, f):
    v = acquisition_value(EI, mu, sigma, f)
    assert v >= 0.0
    assert v >= max(f - mu, 0.0) - 1e-9 * (1 + abs(f) + abs(mu))


@settings(max_examples=200, deadline=None)
@given(mu=st.floats(-50, 50), sigma=st.floats(0, 20), f=st.floats(-50, 50))
def test_pi_is_probability(mu, sigma, f):
    assert 0.0 <= acquisition_value(PI, mu, sigma, f) <= 1.0


@settings(max_examples=100, deadline=None)
@given(mu=st.floats(-10, 10), f=st.floats(-10, 10), s1=st.floats(0.01, 5), s2=st.floats(0.01, 5))
def test_ei_increases_with_sigma(mu, f, s1, s2):
    lo, hi = sorted((s1, s2))
    assert acquisition_value(EI, mu, hi, f) >= acquisition_value(EI, mu, lo, f) - 1e-12


def _surrogate(rng, n=6):
    x = rng.uniform(0, 1, (n, 2))
    return condition(KernelSpec(KernelFamily.MATERN52), GPHyperparams(0.01, 0.4, 1.0), x,
                     rng.normal(size=n))


def test_lcb_beta_zero_argmax_equals_pm_argmax():
    rng = np.random.default_rng(3)
    lcb0 = AcquisitionSpec(AcquisitionFamily.LCB, beta=0.0)
    for _ in range(20):
        s = _surrogate(rng)
        cands = rng.uniform(0, 1, (50, 2))
        assert select_next(lcb0, s, cands, 0.0) == select_next(PM, s, cands, 0.0)


def test_select_next_ties_go_to_lowest_index():
    rng = np.random.default_rng(0)
    s = _surrogate(rng)
    c = rng.uniform(0, 1, (1, 2))
    cands = np.vstack([rng.uniform(0, 1, (1, 2)), c, c, c])
    scores = acquisition_scores(PM, s, cands, 0.0)
    if scores[1] >= scores[0]:
        assert select_next(PM, s, cands, 0.0) == 1
    far = np.full((3, 2), 100.0)  # prior mean everywhere: identical scores
    assert select_next(EI, s, far, 0.0) == 0


def test_select_next_empty_candidates():
    s = _surrogate(np.random.default_rng(1))
    with pytest.raises(ValueError, match="empty"):
        select_next(EI, s, np.empty((0, 2)), 0.0)


def test_vectorized_matches_scalar():
    rng = np.random.default_rng(5)
    mu, sig = rng.normal(size=20), np.abs(rng.normal(size=20))
    sig[::4] = 0.0
    for spec in (EI, PI, LCB, PM):
        vec = acquisition_values(spec, mu, sig, 0.3)
        sc = [acquisition_value(spec, m, s, 0.3) for m, s in zip(mu, sig)]
        np.testing.assert_array_equal(vec, sc)
