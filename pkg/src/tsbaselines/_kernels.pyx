# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: warping-table DP, Hawkes E-step aggregates,
log-likelihood, and Ogata thinning. Mirrors `_kernels_py`."""

from libc.math cimport exp, fabs, log

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "cython"


def dtw_cost(x, y):
    """Terminal cumulative cost of the absolute-difference warping table."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], m = yv.shape[0]
    cdef cnp.ndarray prev_arr = np.empty(m, dtype=np.float64)
    cdef cnp.ndarray cur_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] prev = prev_arr
    cdef double[::1] cur = cur_arr
    cdef double[::1] tmp
    cdef double acc = 0.0, best, xi
    cdef Py_ssize_t i, j
    for j in range(m):
        acc += fabs(xv[0] - yv[j])
        prev[j] = acc
    for i in range(1, n):
        xi = xv[i]
        cur[0] = fabs(xi - yv[0]) + prev[0]
        for j in range(1, m):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = fabs(xi - yv[j]) + best
        tmp = prev
        prev = cur
        cur = tmp
    return prev[m - 1]


def hawkes_suffstats(times, double mu, double alpha, double beta, double window):
    """E-step aggregates (bg, off, off_dt); see the python backend docstring."""
    cdef double[::1] t = np.ascontiguousarray(times, dtype=np.float64)
    cdef Py_ssize_t n = t.shape[0]
    if n == 0:
        return 0.0, 0.0, 0.0
    if alpha == 0.0:
        return float(n), 0.0, 0.0
    cdef double bg = 0.0, off = 0.0, off_dt = 0.0
    cdef double ksum, wsum, dt, k, lam, ti
    cdef Py_ssize_t i, j
    for i in range(n):
        ti = t[i]
        ksum = 0.0
        wsum = 0.0
        j = i - 1
        while j >= 0:
            dt = ti - t[j]
            if dt > window:
                break
            k = alpha * beta * exp(-beta * dt)
            ksum += k
            wsum += k * dt
            j -= 1
        lam = mu + ksum
        bg += mu / lam
        off += ksum / lam
        off_dt += wsum / lam
    return bg, off, off_dt


def hawkes_loglik(times, double big_t, double mu, double alpha, double beta):
    """Exact log-likelihood of events on [0, big_t] under (mu, alpha, beta).

    Uses Kahan-compensated summation so iteration-to-iteration differences
    near an EM fixed point are resolved well below 1e-9.
    """
    cdef double[::1] t = np.ascontiguousarray(times, dtype=np.float64)
    cdef Py_ssize_t n = t.shape[0]
    cdef double a = 0.0, lam, term, total = 0.0, comp = 0.0, yk, tk
    cdef Py_ssize_t i
    for i in range(n):
        if i > 0:
            a = exp(-beta * (t[i] - t[i - 1])) * (1.0 + a)
        lam = mu + alpha * beta * a
        if lam <= 0.0:
            return float("-inf")
        term = log(lam)
        yk = term - comp
        tk = total + yk
        comp = (tk - total) - yk
        total = tk
    if n > 0 and alpha != 0.0:
        for i in range(n):
            term = -alpha * (1.0 - exp(-beta * (big_t - t[i])))
            yk = term - comp
            tk = total + yk
            comp = (tk - total) - yk
            total = tk
    return total - mu * big_t


def hawkes_thinning(
    double mu,
    double alpha,
    double beta,
    double state_t,
    double state_a,
    double t_end,
    exp_draws,
    unif_draws,
    out,
):
    """One batch of Ogata thinning; see the python backend docstring."""
    cdef double[::1] ed = np.ascontiguousarray(exp_draws, dtype=np.float64)
    cdef double[::1] ud = np.ascontiguousarray(unif_draws, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t n_draws = ed.shape[0]
    cdef double jump = alpha * beta
    cdef double t = state_t, a = state_a
    cdef double bound, dt, u, lam
    cdef Py_ssize_t n_out = 0, i = 0
    while i < n_draws:
        bound = mu + jump * a
        if bound <= 0.0:
            return n_out, i, t_end, a, True
        dt = ed[i] / bound
        u = ud[i]
        i += 1
        t += dt
        if t >= t_end:
            return n_out, i, t, a, True
        a *= exp(-beta * dt)
        lam = mu + jump * a
        if u * bound <= lam:
            ov[n_out] = t
            n_out += 1
            a += 1.0
    return n_out, i, t, a, False
