"""Gaussian-process regression on the unit cube.

Kernels are isotropic (one lengthscale) and scaled by an output scale.
Training maximizes the exact log marginal likelihood with Adam over
unconstrained parameters that a scaled logistic maps into fixed
intervals. Targets are standardized per fit; the prior mean is zero in
standardized space.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from . import _backend

NOISE_BOUNDS = (5e-4, 0.2)
LENGTHSCALE_LOWER = 5e-6
OUTPUTSCALE_BOUNDS = (0.05, 20.0)

LEARNING_RATE = 0.05
MAX_TRAIN_ITERS = 50
ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8

_JITTERS = (0.0,) + tuple(10.0 ** k for k in range(-8, -1))


class KernelFamily(enum.IntEnum):
    MATERN32 = 0
    MATERN52 = 1
    RBF = 2
    RQ = 3


_KERNEL_NAMES = {
    KernelFamily.MATERN32: "Matern32",
    KernelFamily.MATERN52: "Matern52",
    KernelFamily.RBF: "RBF",
    KernelFamily.RQ: "RQ",
}


@dataclass(frozen=True)
class KernelSpec:
    family: KernelFamily
    rq_alpha: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "family", KernelFamily(self.family))
        if not self.rq_alpha > 0:
            raise ValueError(f"rq_alpha must be positive, got {self.rq_alpha}")

    @property
    def name(self) -> str:
        return _KERNEL_NAMES[self.family]

    @classmethod
    def from_name(cls, name: str) -> "KernelSpec":
        for fam, label in _KERNEL_NAMES.items():
            if label.lower() == name.lower():
                return cls(fam)
        raise ValueError(f"unknown kernel {name!r}")


def hyperparameter_bounds(dim: int) -> np.ndarray:
    """Closed intervals for (noise, lengthscale, outputscale), shape (3, 2)."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    return np.array(
        [NOISE_BOUNDS, (LENGTHSCALE_LOWER, math.sqrt(dim)), OUTPUTSCALE_BOUNDS],
        dtype=np.float64,
    )


@dataclass(frozen=True)
class GPHyperparams:
    noise_variance: float
    lengthscale: float
    output_scale: float

    def as_array(self) -> np.ndarray:
        return np.array([self.noise_variance, self.lengthscale, self.output_scale])

    def validate(self, dim: int) -> None:
        for value, (lo, hi), label in zip(
            self.as_array(), hyperparameter_bounds(dim), ("noise", "lengthscale", "outputscale")
        ):
            if not lo <= value <= hi:
                raise ValueError(f"{label}={value} outside [{lo}, {hi}]")

    @classmethod
    def from_raw(cls, raw: np.ndarray, dim: int) -> "GPHyperparams":
        b = hyperparameter_bounds(dim)
        # clip guards the round-off at saturated logistics
        vals = np.clip(b[:, 0] + (b[:, 1] - b[:, 0]) * _sigmoid(np.asarray(raw)), b[:, 0], b[:, 1])
        return cls(float(vals[0]), float(vals[1]), float(vals[2]))

    def to_raw(self, dim: int) -> np.ndarray:
        b = hyperparameter_bounds(dim)
        p = (self.as_array() - b[:, 0]) / (b[:, 1] - b[:, 0])
        p = np.clip(p, 1e-12, 1.0 - 1e-12)
        return np.log(p) - np.log1p(-p)


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=np.float64)))


def kernel_matrix(spec: KernelSpec, hp: GPHyperparams, x1, x2) -> np.ndarray:
    """Cross-covariance between two point sets (no noise term)."""
    x1 = np.atleast_2d(np.asarray(x1, dtype=np.float64))
    x2 = np.atleast_2d(np.asarray(x2, dtype=np.float64))
    if x1.shape[1] != x2.shape[1]:
        raise ValueError(f"dimension mismatch: {x1.shape[1]} vs {x2.shape[1]}")
    return _backend.cross_kernel(
        x1, x2, int(spec.family), hp.lengthscale, hp.output_scale, spec.rq_alpha
    )


def kernel_value(spec: KernelSpec, hp: GPHyperparams, x, x2) -> float:
    x = np.asarray(x, dtype=np.float64).ravel()
    x2 = np.asarray(x2, dtype=np.float64).ravel()
    if x.shape != x2.shape:
        raise ValueError(f"dimension mismatch: {x.shape[0]} vs {x2.shape[0]}")
    return float(kernel_matrix(spec, hp, x[None, :], x2[None, :])[0, 0])


@dataclass(frozen=True, eq=False)
class TrainedSurrogate:
    """A GP conditioned on standardized training data.

    ``factorization`` is the lower Cholesky factor of ``K + (noise + jitter) I``
    where jitter is zero unless the plain matrix failed to factor;
    ``inverse_factor`` is its inverse, cached for batched prediction.
    """

    hyperparams: GPHyperparams
    kernel: KernelSpec
    train_inputs: np.ndarray
    train_targets: np.ndarray
    factorization: np.ndarray
    alpha_vector: np.ndarray
    inverse_factor: np.ndarray
    target_mean: float
    target_std: float
    jitter: float = 0.0
    log_marginal_likelihood: float = float("nan")

    @property
    def dim(self) -> int:
        return self.train_inputs.shape[1]

    @property
    def prior_variance(self) -> float:
        return self.hyperparams.output_scale * self.target_std**2


def standardize(targets) -> tuple[np.ndarray, float, float]:
    """Zero-mean, unit-std targets; std falls back to 1.0 when degenerate."""
    y = np.asarray(targets, dtype=np.float64).ravel()
    if y.size == 0 or not np.all(np.isfinite(y)):
        raise ValueError("targets must be a nonempty finite vector")
    mean = float(np.mean(y))
    std = float(np.std(y, ddof=1)) if y.size > 1 else 0.0
    if not std > 1e-12 * max(1.0, abs(mean)):
        std = 1.0
    return (y - mean) / std, mean, std


def _check_inputs(inputs) -> np.ndarray:
    x = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("inputs must be a nonempty (n, d) array")
    if not np.all(np.isfinite(x)):
        raise ValueError("inputs must be finite")
    return x


def condition(kernel: KernelSpec, hp: GPHyperparams, inputs, targets,
              *, lml: float = float("nan")) -> TrainedSurrogate:
    """Condition a GP with fixed hyperparameters on (inputs, targets)."""
    x = _check_inputs(inputs)
    hp.validate(x.shape[1])
    z, mean, std = standardize(targets)
    if z.shape[0] != x.shape[0]:
        raise ValueError("inputs and targets differ in length")
    k = kernel_matrix(kernel, hp, x, x)
    k[np.diag_indices_from(k)] += hp.noise_variance
    eye = np.eye(x.shape[0])
    for jitter in _JITTERS:
        try:
            chol = np.linalg.cholesky(k + jitter * eye)
            break
        except np.linalg.LinAlgError:
            continue
    else:
        raise np.linalg.LinAlgError("covariance not positive definite even with jitter 1e-2")
    linv = solve_triangular(chol, eye, lower=True)
    alpha = solve_triangular(chol.T, solve_triangular(chol, z, lower=True), lower=False)
    return TrainedSurrogate(
        hyperparams=hp,
        kernel=kernel,
        train_inputs=x,
        train_targets=z,
        factorization=chol,
        alpha_vector=alpha,
        inverse_factor=linv,
        target_mean=mean,
        target_std=std,
        jitter=jitter,
        log_marginal_likelihood=lml,
    )


def initial_raw(dim: int, seed: int | None = None) -> np.ndarray:
    """Starting point in raw space: interval midpoints (raw = 0).

    A non-None ``seed`` draws a reproducible perturbation instead, for
    restart experiments.
    """
    if seed is None:
        return np.zeros(3)
    return np.random.default_rng(seed).normal(0.0, 1.0, size=3)


def log_marginal_likelihood(kernel: KernelSpec, raw, inputs, standardized_targets):
    """Exact LML and its gradient w.r.t. the raw parameters."""
    x = _check_inputs(inputs)
    return _backend.lml_and_grad(
        np.asarray(raw, dtype=np.float64), x, np.asarray(standardized_targets, dtype=np.float64),
        int(kernel.family), kernel.rq_alpha, hyperparameter_bounds(x.shape[1]),
    )


def fit_surrogate(kernel: KernelSpec, inputs, targets, seed: int = 0, *,
                  max_iter: int = MAX_TRAIN_ITERS, lr: float = LEARNING_RATE,
                  random_init: bool = False) -> TrainedSurrogate:
    """Train hyperparameters by Adam on the LML, then condition.

    Deterministic in (inputs, targets, seed). The default start is the
    interval midpoint and ignores ``seed``; ``random_init=True`` uses it.
    """
    x = _check_inputs(inputs)
    if x.shape[0] < 2:
        raise ValueError("need at least two training points")
    z, _, _ = standardize(targets)
    if z.shape[0] != x.shape[0]:
        raise ValueError("inputs and targets differ in length")
    raw0 = initial_raw(x.shape[1], seed if random_init else None)
    raw, lml, _ = _backend.train(
        x, z, int(kernel.family), kernel.rq_alpha, hyperparameter_bounds(x.shape[1]),
        raw0, lr, max_iter, ADAM_BETAS[0], ADAM_BETAS[1], ADAM_EPS,
    )
    hp = GPHyperparams.from_raw(raw, x.shape[1])
    return condition(kernel, hp, x, targets, lml=float(lml))


def predict_batch(s: TrainedSurrogate, x, block_size: int = 16384) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and latent variance at many points, in original units."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != s.dim:
        raise ValueError(f"dimension mismatch: {x.shape[1]} vs {s.dim}")
    m = x.shape[0]
    mu = np.empty(m)
    var = np.empty(m)
    hp = s.hyperparams
    linv_t = np.ascontiguousarray(s.inverse_factor.T)
    for start in range(0, m, block_size):
        stop = min(start + block_size, m)
        ks = _backend.scan_kernel(
            x[start:stop], s.train_inputs, int(s.kernel.family),
            hp.lengthscale, hp.output_scale, s.kernel.rq_alpha,
        )
        mu[start:stop] = ks @ s.alpha_vector
        v = ks @ linv_t
        var[start:stop] = hp.output_scale - np.einsum("ij,ij->i", v, v)
    np.maximum(var, 0.0, out=var)
    return s.target_mean + s.target_std * mu, var * s.target_std**2


def predict(s: TrainedSurrogate, x) -> tuple[float, float]:
    x = np.asarray(x, dtype=np.float64).ravel()
    mu, var = predict_batch(s, x[None, :])
    return float(mu[0]), float(var[0])
