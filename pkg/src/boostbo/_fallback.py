"""NumPy implementations of the hot loops, used when ``_core`` is not built.

Signatures and semantics match the compiled module one-to-one.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.spatial.distance import cdist

NAME = "python"

_SQRT3 = math.sqrt(3.0)
_SQRT5 = math.sqrt(5.0)
_LOG_2PI = math.log(2.0 * math.pi)


def _base(family: int, u: np.ndarray, alpha: float) -> np.ndarray:
    if family == 0:
        s = _SQRT3 * u
        return (1.0 + s) * np.exp(-s)
    if family == 1:
        s = _SQRT5 * u
        return (1.0 + s + s * s / 3.0) * np.exp(-s)
    if family == 2:
        return np.exp(-0.5 * u * u)
    return (1.0 + u * u / (2.0 * alpha)) ** (-alpha)


def _ls_factor(family: int, u: np.ndarray, alpha: float) -> np.ndarray:
    if family == 0:
        s = _SQRT3 * u
        return 3.0 * u * u * np.exp(-s)
    if family == 1:
        s = _SQRT5 * u
        return (5.0 / 3.0) * u * u * (1.0 + s) * np.exp(-s)
    if family == 2:
        return u * u * np.exp(-0.5 * u * u)
    return u * u * (1.0 + u * u / (2.0 * alpha)) ** (-alpha - 1.0)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _factor(k: np.ndarray) -> np.ndarray | None:
    jitter = 0.0
    eye = np.eye(k.shape[0])
    while True:
        try:
            return np.linalg.cholesky(k + jitter * eye)
        except np.linalg.LinAlgError:
            pass
        if jitter == 0.0:
            jitter = 1e-8
        elif jitter < 1e-2 * (1.0 - 1e-9):
            jitter *= 10.0
        else:
            return None


def _values(raw: np.ndarray, bounds: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = _sigmoid(raw)
    width = bounds[:, 1] - bounds[:, 0]
    return bounds[:, 0] + width * s, width * s * (1.0 - s)


def _lml_grad(dist, y, family, alpha, raw, bounds):
    vals, dvals = _values(raw, bounds)
    noise, ls, os_ = vals
    u = dist / ls
    b = _base(family, u, alpha)
    k = os_ * b
    k[np.diag_indices_from(k)] += noise
    chol = _factor(k)
    if chol is None:
        return -math.inf, np.zeros(3)
    a = cho_solve((chol, True), y)
    lml = (
        -0.5 * float(y @ a)
        - float(np.sum(np.log(np.diag(chol))))
        - 0.5 * y.shape[0] * _LOG_2PI
    )
    linv = solve_triangular(chol, np.eye(y.shape[0]), lower=True)
    w = np.outer(a, a) - linv.T @ linv
    g_noise = 0.5 * np.trace(w)
    g_os = 0.5 * float(np.sum(w * b))
    g_ls = 0.5 * os_ / ls * float(np.sum(w * _ls_factor(family, u, alpha)))
    return lml, np.array([g_noise, g_ls, g_os]) * dvals


def _prepare(x, y, bounds):
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    bounds = np.asarray(bounds, dtype=np.float64).reshape(3, 2)
    if y.shape[0] != x.shape[0]:
        raise ValueError("shape mismatch")
    return cdist(x, x), y, bounds


def lml_and_grad(raw, x, y, family, alpha, bounds):
    """Log marginal likelihood and its gradient w.r.t. the raw parameters."""
    dist, y, bounds = _prepare(x, y, bounds)
    raw = np.asarray(raw, dtype=np.float64)
    if raw.shape != (3,):
        raise ValueError("shape mismatch")
    return _lml_grad(dist, y, int(family), float(alpha), raw, bounds)


def train(x, y, family, alpha, bounds, raw0, lr, max_iter, beta1, beta2, eps):
    """Adam ascent on the log marginal likelihood with step rejection."""
    dist, y, bounds = _prepare(x, y, bounds)
    theta = np.array(raw0, dtype=np.float64)
    if theta.shape != (3,):
        raise ValueError("shape mismatch")
    f, g = _lml_grad(dist, y, family, alpha, theta, bounds)
    m = np.zeros(3)
    v = np.zeros(3)
    scale, b1t, b2t, accepted = 1.0, 1.0, 1.0, 0
    if not math.isfinite(f):
        return theta, f, 0
    for _ in range(max_iter):
        b1t *= beta1
        b2t *= beta2
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        mhat = m / (1.0 - b1t)
        vhat = v / (1.0 - b2t)
        cand = theta + lr * scale * mhat / (np.sqrt(vhat) + eps)
        fc, gc = _lml_grad(dist, y, family, alpha, cand, bounds)
        if math.isfinite(fc) and fc >= f:
            theta, f, g = cand, fc, gc
            accepted += 1
        else:
            scale *= 0.5
    return theta, f, accepted


def cross_kernel(x1, x2, family, lengthscale, outputscale, alpha):
    """Covariance block ``outputscale * base(||x1_i - x2_j|| / lengthscale)``."""
    a = np.ascontiguousarray(x1, dtype=np.float64)
    b = np.ascontiguousarray(x2, dtype=np.float64)
    if a.shape[1] != b.shape[1]:
        raise ValueError("dimension mismatch")
    u = cdist(a, b) * (1.0 / lengthscale)
    return outputscale * _base(int(family), u, float(alpha))
