# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Vectorized cross-covariance for large candidate scans.

Built with relaxed floating-point flags so the compiler can emit SIMD
exp/sqrt; values agree with ``_core.cross_kernel`` to a few ulp. Only
used for posterior scans, never inside likelihood training.
"""

import numpy as np

from libc.math cimport exp, log, sqrt

NAME = "compiled"

cdef double SQRT3 = 1.7320508075688772
cdef double SQRT5 = 2.23606797749979


def cross_kernel(x1, x2, int family, double lengthscale, double outputscale, double alpha):
    """Covariance block ``outputscale * base(||x1_i - x2_j|| / lengthscale)``."""
    cdef const double[:, ::1] a = np.ascontiguousarray(x1, dtype=np.float64)
    # training points stored axis-major so the inner loop runs unit-stride
    cdef const double[:, ::1] bt = np.ascontiguousarray(np.asarray(x2, dtype=np.float64).T)
    if a.shape[1] != bt.shape[0]:
        raise ValueError("dimension mismatch")
    cdef Py_ssize_t n1 = a.shape[0], n2 = bt.shape[1], d = a.shape[1]
    out = np.empty((n1, n2), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double[::1] s_buf = np.empty(n2)
    cdef double* s = &s_buf[0]
    cdef double* row
    cdef Py_ssize_t i, j, c
    cdef double t, u, q, xc, inv_ls = 1.0 / lengthscale
    cdef double inv_2a = 1.0 / (2.0 * alpha)
    cdef bint alpha_two = alpha == 2.0
    with nogil:
        for i in range(n1):
            row = &o[i, 0]
            for j in range(n2):
                s[j] = 0.0
            for c in range(d):
                xc = a[i, c]
                for j in range(n2):
                    t = xc - bt[c, j]
                    s[j] += t * t
            if family == 0:
                for j in range(n2):
                    u = SQRT3 * sqrt(s[j]) * inv_ls
                    row[j] = outputscale * (1.0 + u) * exp(-u)
            elif family == 1:
                for j in range(n2):
                    u = SQRT5 * sqrt(s[j]) * inv_ls
                    row[j] = outputscale * (1.0 + u + u * u / 3.0) * exp(-u)
            elif family == 2:
                for j in range(n2):
                    row[j] = outputscale * exp(-0.5 * s[j] * inv_ls * inv_ls)
            elif alpha_two:
                for j in range(n2):
                    q = 1.0 + s[j] * inv_ls * inv_ls * 0.25
                    row[j] = outputscale / (q * q)
            else:
                for j in range(n2):
                    q = 1.0 + s[j] * inv_ls * inv_ls * inv_2a
                    row[j] = outputscale * exp(-alpha * log(q))
    return out
