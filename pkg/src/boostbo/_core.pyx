# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: GP hyperparameter training and cross-covariance blocks.

Kernel families are passed as integers (0 = Matern 3/2, 1 = Matern 5/2,
2 = RBF, 3 = RQ). Hyperparameters are handled in the unconstrained "raw"
space as ``(noise, lengthscale, outputscale)`` and mapped into their
intervals by a scaled logistic. Every routine mirrors ``_fallback`` and
releases the GIL for the numeric part.
"""

import numpy as np

from libc.math cimport exp, log, pow, sqrt, isfinite
from libc.stdlib cimport free, malloc
from libc.string cimport memcpy

NAME = "compiled"

cdef double SQRT3 = 1.7320508075688772
cdef double SQRT5 = 2.23606797749979
cdef double LOG_2PI = 1.8378770664093453
cdef double NEG_INF = -float("inf")


cdef inline double _base(int family, double u, double alpha) noexcept nogil:
    cdef double s
    if family == 0:
        s = SQRT3 * u
        return (1.0 + s) * exp(-s)
    elif family == 1:
        s = SQRT5 * u
        return (1.0 + s + s * s / 3.0) * exp(-s)
    elif family == 2:
        return exp(-0.5 * u * u)
    return pow(1.0 + u * u / (2.0 * alpha), -alpha)


cdef inline double _ls_factor(int family, double u, double alpha) noexcept nogil:
    # -u * d base / du; d K / d lengthscale = outputscale * factor / lengthscale
    cdef double s
    if family == 0:
        s = SQRT3 * u
        return 3.0 * u * u * exp(-s)
    elif family == 1:
        s = SQRT5 * u
        return (5.0 / 3.0) * u * u * (1.0 + s) * exp(-s)
    elif family == 2:
        return u * u * exp(-0.5 * u * u)
    return u * u * pow(1.0 + u * u / (2.0 * alpha), -alpha - 1.0)


cdef inline double _sigmoid(double z) noexcept nogil:
    if z >= 0:
        return 1.0 / (1.0 + exp(-z))
    cdef double e = exp(z)
    return e / (1.0 + e)


cdef int _cholesky(double* a, int n) noexcept nogil:
    # In-place lower Cholesky of a row-major n x n matrix; upper part ignored.
    cdef int i, j, k
    cdef double s
    for j in range(n):
        s = a[j * n + j]
        for k in range(j):
            s -= a[j * n + k] * a[j * n + k]
        if not (s > 0.0) or not isfinite(s):
            return -1
        s = sqrt(s)
        a[j * n + j] = s
        for i in range(j + 1, n):
            s = a[i * n + j]
            for k in range(j):
                s -= a[i * n + k] * a[j * n + k]
            a[i * n + j] = s / a[j * n + j]
    return 0


cdef int _factor(double* k, double* l, int n) noexcept nogil:
    # Cholesky of k with jitter escalation 0, 1e-8 ... 1e-2; result in l.
    cdef int i
    cdef double jitter = 0.0
    while True:
        memcpy(l, k, n * n * sizeof(double))
        for i in range(n):
            l[i * n + i] += jitter
        if _cholesky(l, n) == 0:
            return 0
        if jitter == 0.0:
            jitter = 1e-8
        elif jitter < 1e-2 * (1.0 - 1e-9):
            jitter *= 10.0
        else:
            return -1


cdef struct Work:
    int n
    double* dist
    double* y
    double* bmat
    double* gmat
    double* kmat
    double* lmat
    double* linv
    double* avec


cdef int _work_alloc(Work* w, int n) noexcept nogil:
    w.n = n
    w.dist = <double*> malloc(n * n * sizeof(double))
    w.y = <double*> malloc(n * sizeof(double))
    w.bmat = <double*> malloc(n * n * sizeof(double))
    w.gmat = <double*> malloc(n * n * sizeof(double))
    w.kmat = <double*> malloc(n * n * sizeof(double))
    w.lmat = <double*> malloc(n * n * sizeof(double))
    w.linv = <double*> malloc(n * n * sizeof(double))
    w.avec = <double*> malloc(n * sizeof(double))
    if (w.dist == NULL or w.y == NULL or w.bmat == NULL or w.gmat == NULL
            or w.kmat == NULL or w.lmat == NULL or w.linv == NULL or w.avec == NULL):
        return -1
    return 0


cdef void _work_free(Work* w) noexcept nogil:
    free(w.dist)
    free(w.y)
    free(w.bmat)
    free(w.gmat)
    free(w.kmat)
    free(w.lmat)
    free(w.linv)
    free(w.avec)


cdef void _load(Work* w, const double[:, ::1] x, const double[::1] y) noexcept nogil:
    cdef int n = w.n
    cdef int d = x.shape[1]
    cdef int i, j, c
    cdef double s, t
    for i in range(n):
        w.y[i] = y[i]
        w.dist[i * n + i] = 0.0
        for j in range(i):
            s = 0.0
            for c in range(d):
                t = x[i, c] - x[j, c]
                s += t * t
            s = sqrt(s)
            w.dist[i * n + j] = s
            w.dist[j * n + i] = s


cdef void _values(double* raw, double* bounds, double* vals, double* dvals) noexcept nogil:
    cdef int p
    cdef double s, width
    for p in range(3):
        s = _sigmoid(raw[p])
        width = bounds[2 * p + 1] - bounds[2 * p]
        vals[p] = bounds[2 * p] + width * s
        dvals[p] = width * s * (1.0 - s)


cdef double _lml_grad(Work* w, int family, double alpha, double* raw,
                      double* bounds, double* grad) noexcept nogil:
    cdef int n = w.n
    cdef int i, j, k
    cdef double vals[3]
    cdef double dvals[3]
    cdef double noise, ls, os, u, s, quad, logdet, wij
    cdef double g_noise = 0.0, g_os = 0.0, g_ls = 0.0

    _values(raw, bounds, vals, dvals)
    noise = vals[0]
    ls = vals[1]
    os = vals[2]

    for i in range(n):
        for j in range(i + 1):
            u = w.dist[i * n + j] / ls
            w.bmat[i * n + j] = _base(family, u, alpha)
            w.gmat[i * n + j] = _ls_factor(family, u, alpha)
            w.kmat[i * n + j] = os * w.bmat[i * n + j]
        w.kmat[i * n + i] += noise

    if _factor(w.kmat, w.lmat, n) != 0:
        grad[0] = 0.0
        grad[1] = 0.0
        grad[2] = 0.0
        return NEG_INF

    # alpha vector: L^-T L^-1 y
    for i in range(n):
        s = w.y[i]
        for k in range(i):
            s -= w.lmat[i * n + k] * w.avec[k]
        w.avec[i] = s / w.lmat[i * n + i]
    quad = 0.0
    for i in range(n):
        quad += w.avec[i] * w.avec[i]
    for i in range(n - 1, -1, -1):
        s = w.avec[i]
        for k in range(i + 1, n):
            s -= w.lmat[k * n + i] * w.avec[k]
        w.avec[i] = s / w.lmat[i * n + i]

    logdet = 0.0
    for i in range(n):
        logdet += log(w.lmat[i * n + i])

    # inverse of the lower factor, then K^-1 = Linv^T Linv (lower part into kmat)
    for j in range(n):
        w.linv[j * n + j] = 1.0 / w.lmat[j * n + j]
        for i in range(j + 1, n):
            s = 0.0
            for k in range(j, i):
                s -= w.lmat[i * n + k] * w.linv[k * n + j]
            w.linv[i * n + j] = s / w.lmat[i * n + i]
    for i in range(n):
        for j in range(i + 1):
            s = 0.0
            for k in range(i, n):
                s += w.linv[k * n + i] * w.linv[k * n + j]
            w.kmat[i * n + j] = s

    for i in range(n):
        wij = w.avec[i] * w.avec[i] - w.kmat[i * n + i]
        g_noise += wij
        g_os += wij
        for j in range(i):
            wij = w.avec[i] * w.avec[j] - w.kmat[i * n + j]
            g_os += 2.0 * wij * w.bmat[i * n + j]
            g_ls += 2.0 * wij * w.gmat[i * n + j]
    g_noise *= 0.5
    g_os *= 0.5
    g_ls *= 0.5 * os / ls

    grad[0] = g_noise * dvals[0]
    grad[1] = g_ls * dvals[1]
    grad[2] = g_os * dvals[2]
    return -0.5 * quad - logdet - 0.5 * n * LOG_2PI


def _bounds_buffer(bounds):
    b = np.ascontiguousarray(bounds, dtype=np.float64).reshape(-1)
    if b.shape[0] != 6:
        raise ValueError("bounds must have shape (3, 2)")
    return b


def lml_and_grad(raw, x, y, int family, double alpha, bounds):
    """Log marginal likelihood and its gradient w.r.t. the raw parameters."""
    cdef const double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] rv = np.ascontiguousarray(raw, dtype=np.float64).copy()
    cdef double[::1] bv = _bounds_buffer(bounds)
    cdef double[::1] gv = np.zeros(3)
    cdef Work w
    cdef double lml
    cdef int n = xv.shape[0]
    if yv.shape[0] != n or rv.shape[0] != 3:
        raise ValueError("shape mismatch")
    if _work_alloc(&w, n) != 0:
        _work_free(&w)
        raise MemoryError()
    with nogil:
        _load(&w, xv, yv)
        lml = _lml_grad(&w, family, alpha, &rv[0], &bv[0], &gv[0])
    _work_free(&w)
    return lml, np.asarray(gv)


def train(x, y, int family, double alpha, bounds, raw0, double lr,
          int max_iter, double beta1, double beta2, double eps):
    """Adam ascent on the log marginal likelihood with step rejection.

    A step whose likelihood falls below the current value is rejected and
    halves the step multiplier. Returns ``(raw, lml, accepted_steps)``.
    """
    cdef const double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] bv = _bounds_buffer(bounds)
    cdef double[::1] theta = np.ascontiguousarray(raw0, dtype=np.float64).copy()
    cdef int n = xv.shape[0]
    cdef Work w
    cdef double cand[3]
    cdef double g[3]
    cdef double gc[3]
    cdef double m[3]
    cdef double v[3]
    cdef double f, fc, scale = 1.0, b1t = 1.0, b2t = 1.0, mhat, vhat
    cdef int it, p, accepted = 0
    if yv.shape[0] != n or theta.shape[0] != 3:
        raise ValueError("shape mismatch")
    if _work_alloc(&w, n) != 0:
        _work_free(&w)
        raise MemoryError()
    with nogil:
        _load(&w, xv, yv)
        f = _lml_grad(&w, family, alpha, &theta[0], &bv[0], g)
        for p in range(3):
            m[p] = 0.0
            v[p] = 0.0
        if isfinite(f):
            for it in range(max_iter):
                b1t *= beta1
                b2t *= beta2
                for p in range(3):
                    m[p] = beta1 * m[p] + (1.0 - beta1) * g[p]
                    v[p] = beta2 * v[p] + (1.0 - beta2) * g[p] * g[p]
                    mhat = m[p] / (1.0 - b1t)
                    vhat = v[p] / (1.0 - b2t)
                    cand[p] = theta[p] + lr * scale * mhat / (sqrt(vhat) + eps)
                fc = _lml_grad(&w, family, alpha, cand, &bv[0], gc)
                if isfinite(fc) and fc >= f:
                    for p in range(3):
                        theta[p] = cand[p]
                        g[p] = gc[p]
                    f = fc
                    accepted += 1
                else:
                    scale *= 0.5
    _work_free(&w)
    return np.asarray(theta), f, accepted


def cross_kernel(x1, x2, int family, double lengthscale, double outputscale, double alpha):
    """Covariance block ``outputscale * base(||x1_i - x2_j|| / lengthscale)``."""
    cdef const double[:, ::1] a = np.ascontiguousarray(x1, dtype=np.float64)
    cdef const double[:, ::1] b = np.ascontiguousarray(x2, dtype=np.float64)
    if a.shape[1] != b.shape[1]:
        raise ValueError("dimension mismatch")
    cdef Py_ssize_t n1 = a.shape[0], n2 = b.shape[0], d = a.shape[1]
    out = np.empty((n1, n2), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j, c
    cdef double s, t, inv_ls = 1.0 / lengthscale
    with nogil:
        for i in range(n1):
            for j in range(n2):
                s = 0.0
                for c in range(d):
                    t = a[i, c] - b[j, c]
                    s += t * t
                o[i, j] = outputscale * _base(family, sqrt(s) * inv_ls, alpha)
    return out
