"""ARIMA(p,d,q): two-stage conditional least-squares estimation, iterative
multi-step forecasting, and validation-set grid search.

Estimation follows the Hannan-Rissanen recipe: a long autoregression supplies
residual proxies, then AR and MA coefficients are estimated jointly by least
squares on the differenced series. This keeps large orders (p, q up to 96)
tractable where full likelihood maximization is not.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .core import DEFAULT_BLOCK, LONG_TERM, SHORT_TERM, BinnedSeries
from .errors import (
    ContractError,
    DataError,
    GridExhaustedError,
    InsufficientHistoryError,
    ProtocolError,
    RankDeficiencyError,
)

#: candidate AR/MA lag counts and differencing orders for the default grid
GRID_LAGS = (24, 48, 72, 96)
GRID_D = (0, 1, 2)

RIDGE_LAMBDA = 1e-6


class ArimaOrder(NamedTuple):
    p: int
    d: int
    q: int


def default_grid() -> list[ArimaOrder]:
    """All 48 (p, d, q) combinations with p, q in GRID_LAGS and d in GRID_D."""
    return [ArimaOrder(p, d, q) for p in GRID_LAGS for d in GRID_D for q in GRID_LAGS]


@dataclass(frozen=True)
class ArimaModel:
    """Fitted coefficients plus the state needed to forecast.

    `residuals` are the in-sample one-step errors on the differenced scale;
    `last_values` are the final d raw observations of the training series,
    kept for undifferencing forecasts that continue the training data.
    """

    order: ArimaOrder
    mu: float
    phi: np.ndarray
    theta: np.ndarray
    residuals: np.ndarray
    last_values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "phi", np.asarray(self.phi, dtype=np.float64))
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=np.float64))
        object.__setattr__(self, "residuals", np.asarray(self.residuals, dtype=np.float64))
        object.__setattr__(self, "last_values", np.asarray(self.last_values, dtype=np.float64))
        if self.phi.size != self.order.p or self.theta.size != self.order.q:
            raise ContractError("coefficient lengths must match the order")
        if not np.all(np.isfinite(self.residuals)):
            raise ContractError("residuals must be finite")

    def to_json(self) -> str:
        doc = {
            "order": list(self.order),
            "mu": self.mu,
            "phi": [float(v) for v in self.phi],
            "theta": [float(v) for v in self.theta],
            "last_values": [float(v) for v in self.last_values],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "ArimaModel":
        doc = json.loads(text)
        return cls(
            order=ArimaOrder(*doc["order"]),
            mu=float(doc["mu"]),
            phi=np.asarray(doc["phi"], dtype=np.float64),
            theta=np.asarray(doc["theta"], dtype=np.float64),
            residuals=np.zeros(0),
            last_values=np.asarray(doc["last_values"], dtype=np.float64),
        )


def _as_counts(series) -> np.ndarray:
    if isinstance(series, BinnedSeries):
        return np.asarray(series.counts, dtype=np.float64)
    return np.asarray(series, dtype=np.float64).ravel()


def difference(x, d: int) -> np.ndarray:
    """Apply first-differencing d times."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if d < 0:
        raise ContractError("differencing order must be non-negative")
    if x.size <= d:
        raise DataError(f"series of length {x.size} cannot be differenced {d} times")
    for _ in range(d):
        x = np.diff(x)
    return x


def undifference(dx, last_values, d: int) -> np.ndarray:
    """Invert `difference` for a continuation series.

    `dx` continues the d-times differenced series and `last_values` holds the
    last d raw observations preceding the continuation; the raw continuation
    comes back via d nested cumulative sums.
    """
    dx = np.asarray(dx, dtype=np.float64).ravel()
    tail = np.asarray(last_values, dtype=np.float64).ravel()
    if d < 0:
        raise ContractError("differencing order must be non-negative")
    if tail.size != d:
        raise ContractError(f"need exactly {d} tail values, got {tail.size}")
    if d == 0:
        return dx.copy()
    # anchor at level k = last value of the k-times differenced raw tail
    anchors = []
    level = tail
    for _ in range(d):
        anchors.append(level[-1])
        level = np.diff(level)
    out = dx
    for k in range(d - 1, -1, -1):
        out = anchors[k] + np.cumsum(out)
    return out


def _solve_ols(design: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Least squares with a ridge fallback for rank-deficient systems."""
    coef, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank == design.shape[1] and np.all(np.isfinite(coef)):
        return coef
    gram = design.T @ design
    gram[np.diag_indices_from(gram)] += RIDGE_LAMBDA
    try:
        coef = np.linalg.solve(gram, design.T @ target)
    except np.linalg.LinAlgError as exc:
        raise RankDeficiencyError(f"regression system unsolvable: {exc}") from exc
    if not np.all(np.isfinite(coef)):
        raise RankDeficiencyError("ridge-regularized solve produced non-finite coefficients")
    return coef


def _lagged_design(w: np.ndarray, eps: Optional[np.ndarray], p: int, q: int, t0: int):
    """Rows t = t0..n-1 of [1, w lags 1..p, eps lags 1..q]."""
    n = w.size
    rows = n - t0
    cols = 1 + p + q
    design = np.empty((rows, cols), dtype=np.float64)
    design[:, 0] = 1.0
    for i in range(1, p + 1):
        design[:, i] = w[t0 - i : n - i]
    for j in range(1, q + 1):
        design[:, p + j] = eps[t0 - j : n - j]
    return design, w[t0:]


def _hannan_rissanen(w: np.ndarray, p: int, q: int):
    """Estimate (mu, phi, theta) on an already-differenced series."""
    n = w.size
    if p == 0 and q == 0:
        return float(np.mean(w)), np.zeros(0), np.zeros(0)
    if q == 0:
        if n <= p:
            raise DataError(f"{n} differenced points cannot support p={p}")
        design, target = _lagged_design(w, None, p, 0, p)
        coef = _solve_ols(design, target)
        return float(coef[0]), coef[1 : p + 1].copy(), np.zeros(0)

    h = 2 * max(p, q)
    if n <= h + q + max(p, q):
        # not enough rows for the full-length long AR; shrink it
        h = max(p, q)
    if n <= h + q:
        raise DataError(f"{n} differenced points cannot support (p={p}, q={q})")

    long_design, long_target = _lagged_design(w, None, h, 0, h)
    long_coef = _solve_ols(long_design, long_target)
    proxies = np.zeros(n)
    proxies[h:] = long_target - long_design @ long_coef

    t0 = h + q
    design, target = _lagged_design(w, proxies, p, q, t0)
    coef = _solve_ols(design, target)
    mu = float(coef[0])
    phi = coef[1 : p + 1].copy()
    theta = -coef[p + 1 :].copy()
    return mu, phi, theta


def _innovation_residuals(w: np.ndarray, mu: float, phi: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """One-step errors under the fitted recursion, zero over the warm-up."""
    p, q = phi.size, theta.size
    n = w.size
    eps = np.zeros(n)
    for t in range(p, n):
        pred = mu
        if p:
            pred += float(phi @ w[t - p : t][::-1])
        if q:
            lo = max(t - q, 0)
            window = eps[lo:t][::-1]
            pred -= float(theta[: window.size] @ window)
        eps[t] = w[t] - pred
    return eps


def fit_arima(train, order: ArimaOrder) -> ArimaModel:
    """Fit by conditional least squares on the d-times differenced series."""
    order = ArimaOrder(*order)
    p, d, q = order
    if min(p, d, q) < 0:
        raise ContractError("order components must be non-negative")
    x = _as_counts(train)
    if not np.all(np.isfinite(x)):
        raise DataError("training series contains non-finite values")
    if x.size <= d + max(p, q) + q:
        raise DataError(
            f"training length {x.size} is below the minimum {d + max(p, q) + q + 1} "
            f"for order {tuple(order)}"
        )
    w = difference(x, d)
    mu, phi, theta = _hannan_rissanen(w, p, q)
    residuals = _innovation_residuals(w, mu, phi, theta)
    return ArimaModel(order, mu, phi, theta, residuals, x[x.size - d :])


def _roll_forward(
    w: np.ndarray, eps: np.ndarray, mu: float, phi: np.ndarray, theta: np.ndarray, steps: int
) -> np.ndarray:
    """Iterate the recursion `steps` bins past the end of w; future errors are 0."""
    p, q = phi.size, theta.size
    n = w.size
    wext = np.concatenate([w, np.zeros(steps)])
    eext = np.concatenate([eps, np.zeros(steps)])
    for k in range(steps):
        t = n + k
        pred = mu
        if p:
            pred += float(phi @ wext[t - p : t][::-1])
        if q:
            lo = max(t - q, 0)
            window = eext[lo:t][::-1]
            pred -= float(theta[: window.size] @ window)
        wext[t] = pred
    return wext[n:]


def forecast_arima(
    model: ArimaModel,
    history,
    horizon: int,
    protocol: str = LONG_TERM,
    test_gt=None,
    block: int = DEFAULT_BLOCK,
):
    """Forecast `horizon` bins past the end of `history`.

    Long-term feeds its own predictions forward for the whole horizon.
    Short-term re-conditions on the observed ground truth at every block
    boundary, never looking inside the block being predicted. Output values
    are clamped to be non-negative after undifferencing.
    """
    if horizon < 1:
        raise ProtocolError("horizon must be at least one bin")
    if protocol not in (LONG_TERM, SHORT_TERM):
        raise ProtocolError(f"unknown protocol {protocol!r}")
    p, d, q = model.order
    x = _as_counts(history)
    if x.size < p + d + 1:
        raise InsufficientHistoryError(
            f"need at least {p + d + 1} history bins for order {tuple(model.order)}"
        )

    if protocol == SHORT_TERM:
        if test_gt is None:
            raise ProtocolError("short-term forecasting requires the observed ground truth")
        gt = _as_counts(test_gt)
        if gt.size != horizon:
            raise ProtocolError(f"ground truth length {gt.size} must equal the horizon {horizon}")
        if horizon % block:
            raise ProtocolError(f"horizon {horizon} is not a multiple of the {block}-bin block")

    def block_forecast(raw: np.ndarray, steps: int) -> np.ndarray:
        w = difference(raw, d) if d else raw
        eps = _innovation_residuals(w, model.mu, model.phi, model.theta)
        dw = _roll_forward(w, eps, model.mu, model.phi, model.theta, steps)
        out = undifference(dw, raw[raw.size - d :], d) if d else dw
        return np.maximum(out, 0.0)

    if protocol == LONG_TERM:
        values = block_forecast(x, horizon)
    else:
        parts = []
        raw = x
        for b in range(horizon // block):
            parts.append(block_forecast(raw, block))
            raw = np.concatenate([raw, gt[b * block : (b + 1) * block]])
        values = np.concatenate(parts)

    if isinstance(history, BinnedSeries):
        return BinnedSeries(history.end, values, history.bin_width)
    return values


def _rmse(a: np.ndarray, b: np.ndarray) -> float:
    return float(math.sqrt(np.mean((a - b) ** 2)))


def grid_search_arima(train, validation, grid: Optional[Sequence[ArimaOrder]] = None):
    """Score each candidate by long-term forecast RMSE over the validation set.

    Returns (best order, {order: rmse}); failed fits score NaN. Ties break by
    smaller p+q, then smaller d, then lexicographic (p, d, q).
    """
    candidates = [ArimaOrder(*o) for o in (grid if grid is not None else default_grid())]
    if not candidates:
        raise ContractError("grid must contain at least one order")
    train_x = _as_counts(train)
    val_x = _as_counts(validation)
    scores: dict[ArimaOrder, float] = {}
    for order in candidates:
        try:
            model = fit_arima(train_x, order)
            fc = forecast_arima(model, train_x, val_x.size)
            scores[order] = _rmse(val_x, fc)
        except Exception:
            scores[order] = float("nan")
    viable = {o: s for o, s in scores.items() if math.isfinite(s)}
    if not viable:
        raise GridExhaustedError("every grid candidate failed to fit")
    best = min(viable, key=lambda o: (viable[o], o.p + o.q, o.d, (o.p, o.d, o.q)))
    return best, scores
