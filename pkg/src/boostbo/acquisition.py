"""Acquisition functions for minimization over finite candidate sets.

All four are maximized. ``f_best`` is the lowest observed value.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .gp import TrainedSurrogate, predict_batch

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class AcquisitionFamily(enum.IntEnum):
    EI = 0
    PI = 1
    LCB = 2
    PM = 3


@dataclass(frozen=True)
class AcquisitionSpec:
    family: AcquisitionFamily
    beta: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "family", AcquisitionFamily(self.family))
        if not self.beta >= 0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")

    @property
    def name(self) -> str:
        return self.family.name

    @classmethod
    def from_name(cls, name: str) -> "AcquisitionSpec":
        try:
            return cls(AcquisitionFamily[name.upper()])
        except KeyError:
            raise ValueError(f"unknown acquisition {name!r}") from None


def acquisition_values(spec: AcquisitionSpec, mu, sigma, f_best: float) -> np.ndarray:
    """Vectorized acquisition values; sigma is a standard deviation."""
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    fam = spec.family
    if fam is AcquisitionFamily.PM:
        return -mu
    if fam is AcquisitionFamily.LCB:
        return -(mu - spec.beta * sigma)

    diff = f_best - mu
    pos = sigma > 0
    safe = np.where(pos, sigma, 1.0)
    # subnormal sigma sends z to +-inf, where both terms have exact limits
    with np.errstate(over="ignore"):
        z = diff / safe
        if fam is AcquisitionFamily.PI:
            return np.where(pos, ndtr(z), (mu < f_best).astype(np.float64))
        ei = diff * ndtr(z) + safe * _INV_SQRT_2PI * np.exp(-0.5 * z * z)
    # cancellation deep in the tail can dip below zero by a few ulp
    return np.where(pos, np.maximum(ei, 0.0), np.maximum(diff, 0.0))


def acquisition_value(spec: AcquisitionSpec, mu: float, sigma: float, f_best: float) -> float:
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    return float(acquisition_values(spec, np.array([mu]), np.array([sigma]), f_best)[0])


def acquisition_scores(spec: AcquisitionSpec, surrogate: TrainedSurrogate, candidates,
                       f_best: float) -> np.ndarray:
    mu, var = predict_batch(surrogate, candidates)
    return acquisition_values(spec, mu, np.sqrt(var), f_best)


def select_next(spec: AcquisitionSpec, surrogate: TrainedSurrogate, candidates,
                f_best: float) -> int:
    """Index of the best candidate; ties go to the lowest index."""
    candidates = np.atleast_2d(np.asarray(candidates, dtype=np.float64))
    if candidates.size == 0:
        raise ValueError("candidate set is empty")
    return int(np.argmax(acquisition_scores(spec, surrogate, candidates, f_best)))
