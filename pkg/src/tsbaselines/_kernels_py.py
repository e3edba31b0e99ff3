"""Pure-Python (numpy) implementations of the hot numeric kernels.

Mirrors the compiled module in `_kernels.pyx`; `_backend` picks whichever is
available. Both backends implement the same arithmetic, so results agree to
floating-point reordering.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"


def dtw_cost(x: np.ndarray, y: np.ndarray) -> float:
    """Terminal cumulative cost of the absolute-difference warping table."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, m = x.size, y.size
    prev = np.empty(m, dtype=np.float64)
    cur = np.empty(m, dtype=np.float64)
    acc = 0.0
    for j in range(m):
        acc += abs(x[0] - y[j])
        prev[j] = acc
    for i in range(1, n):
        cur[0] = abs(x[i] - y[0]) + prev[0]
        for j in range(1, m):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = abs(x[i] - y[j]) + best
        prev, cur = cur, prev
    return float(prev[m - 1])


def hawkes_suffstats(
    times: np.ndarray, mu: float, alpha: float, beta: float, window: float
) -> tuple[float, float, float]:
    """E-step aggregates for the exponential-kernel branching structure.

    For each event i with intensity l_i = mu + sum_j k_ij over earlier events
    within `window`, where k_ij = alpha*beta*exp(-beta*(t_i - t_j)), returns

      bg     = sum_i mu / l_i            (expected background events)
      off    = sum_ij k_ij / l_i         (expected triggered events)
      off_dt = sum_ij (t_i-t_j) k_ij/l_i (expected triggering delay mass)
    """
    t = np.asarray(times, dtype=np.float64)
    n = t.size
    if n == 0:
        return 0.0, 0.0, 0.0
    idx = np.arange(n)
    lo = np.searchsorted(t, t - window, side="left")
    lens = idx - lo
    total = int(lens.sum())
    if total == 0 or alpha == 0.0:
        return float(n), 0.0, 0.0
    i_idx = np.repeat(idx, lens)
    offsets = np.arange(total) - np.repeat(np.cumsum(lens) - lens, lens)
    j_idx = np.repeat(lo, lens) + offsets
    dt = t[i_idx] - t[j_idx]
    k = alpha * beta * np.exp(-beta * dt)
    ksum = np.bincount(i_idx, weights=k, minlength=n)
    wsum = np.bincount(i_idx, weights=k * dt, minlength=n)
    lam = mu + ksum
    bg = float(np.sum(mu / lam))
    off = float(np.sum(ksum / lam))
    off_dt = float(np.sum(wsum / lam))
    return bg, off, off_dt


def hawkes_loglik(times: np.ndarray, big_t: float, mu: float, alpha: float, beta: float) -> float:
    """Exact log-likelihood of events on [0, big_t] under (mu, alpha, beta)."""
    t = np.asarray(times, dtype=np.float64)
    n = t.size
    terms = np.empty(n, dtype=np.float64)
    a = 0.0
    for i in range(n):
        if i > 0:
            a = math.exp(-beta * (t[i] - t[i - 1])) * (1.0 + a)
        lam = mu + alpha * beta * a
        if lam <= 0.0:
            return -math.inf
        terms[i] = math.log(lam)
    total = float(np.sum(terms)) - mu * big_t
    if n and alpha != 0.0:
        total -= alpha * float(np.sum(1.0 - np.exp(-beta * (big_t - t))))
    return total


def hawkes_thinning(
    mu: float,
    alpha: float,
    beta: float,
    state_t: float,
    state_a: float,
    t_end: float,
    exp_draws: np.ndarray,
    unif_draws: np.ndarray,
    out: np.ndarray,
):
    """One batch of Ogata thinning; resumable when the draw budget runs out.

    `state_a` is the decayed count sum A(t) = sum_i exp(-beta*(t - t_i)) over
    every past event, so the intensity at t is mu + alpha*beta*A(t). Returns
    (n_accepted, n_draws_used, state_t, state_a, done).
    """
    n_draws = exp_draws.size
    jump = alpha * beta
    t = state_t
    a = state_a
    n_out = 0
    i = 0
    while i < n_draws:
        bound = mu + jump * a
        if bound <= 0.0:
            return n_out, i, t_end, a, True
        dt = exp_draws[i] / bound
        u = unif_draws[i]
        i += 1
        t += dt
        if t >= t_end:
            return n_out, i, t, a, True
        a *= math.exp(-beta * dt)
        lam = mu + jump * a
        if u * bound <= lam:
            out[n_out] = t
            n_out += 1
            a += 1.0
    return n_out, i, t, a, False
