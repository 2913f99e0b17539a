"""Box-Jenkins tools: correlograms, ARIMA(p, d, q) estimation and forecasting.

Estimation minimises the conditional sum of squared innovations (CSS),
with pre-sample innovations set to zero, by multi-start Nelder-Mead.
Every trial point is mapped into the stationary/invertible region by
reflecting AR and MA polynomial roots that fall inside the unit circle.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.signal import lfilter

from .errors import (
    DegenerateSeriesError,
    InsufficientContextError,
    InsufficientDataError,
    NonConvergenceError,
    SelectionFailureError,
)
from .optimize import nelder_mead
from .series import AnnualSeries, difference

ROOT_MARGIN = 1e-6
N_STARTS = 5
START_OFFSET = 0.3
XTOL = 1e-8
MAX_EVALS = 5000


@dataclass(frozen=True)
class CorrelogramPoint:
    lag: int
    value: float
    conf_band: float


def _centered(s) -> np.ndarray:
    x = np.asarray(s.values if isinstance(s, AnnualSeries) else s, dtype=float)
    x = x - x.mean()
    if not np.any(x):
        raise DegenerateSeriesError("constant series has no autocorrelation")
    return x


def _acf_array(x: np.ndarray, max_lag: int) -> np.ndarray:
    n = x.size
    nfft = 1 << (2 * n - 1).bit_length()
    spec = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(spec * np.conj(spec), nfft)[: max_lag + 1]
    out = acov / acov[0]
    out[0] = 1.0
    return out


def _check_lag(n: int, max_lag: int):
    if max_lag < 0 or max_lag >= n:
        raise InsufficientDataError(f"max_lag must lie in [0, {n - 1}], got {max_lag}")


def acf(s: AnnualSeries, max_lag: int) -> list[CorrelogramPoint]:
    """Sample autocorrelations for lags 0..max_lag (full-sample denominator)."""
    x = _centered(s)
    _check_lag(x.size, max_lag)
    band = 1.96 / math.sqrt(x.size)
    return [CorrelogramPoint(k, float(v), band) for k, v in enumerate(_acf_array(x, max_lag))]


def _durbin_levinson(r: np.ndarray) -> np.ndarray:
    max_lag = r.size - 1
    out = np.zeros(max_lag + 1)
    out[0] = 1.0
    phi = np.zeros(0)
    for k in range(1, max_lag + 1):
        num = r[k] - phi @ r[k - 1 : 0 : -1] if k > 1 else r[1]
        den = 1.0 - phi @ r[1:k] if k > 1 else 1.0
        a = num / den
        phi = np.concatenate((phi - a * phi[::-1], [a]))
        out[k] = a
    return out


def pacf(s: AnnualSeries, max_lag: int) -> list[CorrelogramPoint]:
    """Partial autocorrelations by Durbin-Levinson on the sample ACF."""
    x = _centered(s)
    _check_lag(x.size, max_lag)
    band = 1.96 / math.sqrt(x.size)
    vals = _durbin_levinson(_acf_array(x, max_lag))
    return [CorrelogramPoint(k, float(v), band) for k, v in enumerate(vals)]


# ---------------------------------------------------------------------------
# polynomial roots


def _poly_roots(coeffs: np.ndarray, sign: float) -> np.ndarray:
    poly = np.concatenate(([1.0], sign * coeffs))
    nz = np.flatnonzero(poly)
    return P.polyroots(poly[: nz[-1] + 1]) if nz[-1] > 0 else np.empty(0)


def _stable(coeffs, sign: float, margin: float = 0.0) -> bool:
    """Step-down (Schur-Cohn) test: roots of 1 - sum(phi z^k) outside radius 1 + margin."""
    r = 1.0 + margin
    phi = [-sign * float(c) * r ** (k + 1) for k, c in enumerate(coeffs)]
    while phi:
        kappa = phi[-1]
        if abs(kappa) >= 1.0:
            return False
        den = 1.0 - kappa * kappa
        m = len(phi) - 1
        phi = [(phi[j] + kappa * phi[m - 1 - j]) / den for j in range(m)]
    return True


def reflect_roots(coeffs, sign: float) -> np.ndarray:
    """Move roots of 1 + sign*(c1 z + ... + cm z^m) outside the unit circle.

    ``sign`` is -1 for AR coefficients and +1 for MA coefficients.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.size == 0 or not np.any(c):
        return c.copy()
    if _stable(c, sign, ROOT_MARGIN):
        return c.copy()
    roots = _poly_roots(c, sign)
    mod = np.abs(roots)
    roots = np.where(mod < 1.0, 1.0 / np.conj(roots), roots)
    mod = np.abs(roots)
    roots = np.where(mod < 1.0 + ROOT_MARGIN, roots * (1.0 + ROOT_MARGIN) / mod, roots)
    poly = P.polyfromroots(roots)
    poly = np.real(poly / poly[0])
    out = np.zeros_like(c)
    out[: poly.size - 1] = sign * poly[1:]
    return out


def roots_outside_unit_circle(coeffs, sign: float) -> bool:
    c = np.asarray(coeffs, dtype=float)
    if c.size == 0 or not np.any(c):
        return True
    return _stable(c, sign)


# ---------------------------------------------------------------------------
# model


@dataclass(frozen=True, eq=False)
class ArimaModel:
    """Fitted (or hand-specified) ARIMA model.

    ``intercept`` is the mean of the d-times differenced process, so with
    d >= 1 it acts as a drift in levels. ``n_obs`` counts the innovations
    entering the CSS objective.
    """

    p: int
    d: int
    q: int
    ar_coeffs: np.ndarray
    ma_coeffs: np.ndarray
    intercept: float = 0.0
    sigma2: float = 1.0
    log_css: float = float("nan")
    n_obs: int = 0
    residuals: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        ar = np.array(self.ar_coeffs, dtype=float).reshape(-1)
        ma = np.array(self.ma_coeffs, dtype=float).reshape(-1)
        if ar.size != self.p or ma.size != self.q:
            raise ValueError(f"expected {self.p} AR and {self.q} MA coefficients")
        if min(self.p, self.d, self.q) < 0:
            raise ValueError("orders must be non-negative")
        if not roots_outside_unit_circle(ar, -1.0):
            raise ValueError(f"AR coefficients {ar} are not stationary")
        if not roots_outside_unit_circle(ma, 1.0):
            raise ValueError(f"MA coefficients {ma} are not invertible")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")
        ar.setflags(write=False)
        ma.setflags(write=False)
        object.__setattr__(self, "ar_coeffs", ar)
        object.__setattr__(self, "ma_coeffs", ma)

    @property
    def order(self) -> tuple[int, int, int]:
        return (self.p, self.d, self.q)

    @property
    def css(self) -> float:
        return math.exp(self.log_css)

    @property
    def aic(self) -> float:
        return self.n_obs * math.log(self.css / self.n_obs) + 2 * (self.p + self.q + 1)


def _css_residuals(w: np.ndarray, mu: float, ar: np.ndarray, ma: np.ndarray) -> np.ndarray:
    """Innovations e[t], t = p..N-1, with e = 0 before the sample."""
    x = w - mu
    p = ar.size
    n = x.size
    u = x[p:].copy()
    for i in range(p):
        u -= ar[i] * x[p - 1 - i : n - 1 - i]
    if ma.size:
        return lfilter([1.0], np.concatenate(([1.0], ma)), u)
    return u


def _checked_css(resid: np.ndarray) -> float:
    css = float(resid @ resid)
    if not css > 0.0:
        raise DegenerateSeriesError("model fits the series exactly; CSS is zero")
    return css


def _unpack(theta: np.ndarray, p: int, q: int):
    return theta[0], reflect_roots(theta[1 : 1 + p], -1.0), reflect_roots(theta[1 + p :], 1.0)


def _start_points(p: int, q: int) -> list[np.ndarray]:
    k = p + q
    alt = np.where(np.arange(k) % 2 == 0, 1.0, -1.0)
    patterns = [np.zeros(k), np.ones(k), -np.ones(k), alt, -alt][:N_STARTS]
    return [np.concatenate(([0.0], START_OFFSET * pat)) for pat in patterns]


def fit_arima(
    s: AnnualSeries,
    p: int,
    d: int,
    q: int,
    max_evals: int = MAX_EVALS,
    xtol: float = XTOL,
) -> ArimaModel:
    """CSS estimate of an ARIMA(p, d, q) with a constant on the differenced scale."""
    if min(p, d, q) < 0:
        raise ValueError("orders must be non-negative")
    if len(s) < p + q + d + 10:
        raise InsufficientDataError(
            f"ARIMA({p},{d},{q}) needs at least {p + q + d + 10} observations, got {len(s)}"
        )
    w = difference(s, d).values
    mean, scale = float(w.mean()), float(w.std())
    if scale == 0.0:
        raise DegenerateSeriesError("differenced series is constant")

    if p == 0 and q == 0:
        resid = w - mean
        css = _checked_css(resid)
        return ArimaModel(
            p, d, q, [], [], intercept=mean, sigma2=css / w.size,
            log_css=math.log(css), n_obs=w.size, residuals=resid,
        )

    z = (w - mean) / scale

    def objective(theta):
        e = _css_residuals(z, *_unpack(theta, p, q))
        return e @ e

    runs = [nelder_mead(objective, x0, xtol=xtol, max_evals=max_evals) for x0 in _start_points(p, q)]
    best = min(runs, key=lambda r: r.fun)
    if not any(r.converged for r in runs):
        mu, ar, ma = _unpack(best.x, p, q)
        point = np.concatenate(([mean + scale * mu], ar, ma))
        raise NonConvergenceError(
            f"ARIMA({p},{d},{q}) simplex did not converge within {max_evals} evaluations",
            best_point=point,
            best_value=best.fun * scale**2,
        )

    mu, ar, ma = _unpack(best.x, p, q)
    resid = scale * _css_residuals(z, mu, ar, ma)
    css = _checked_css(resid)
    model = ArimaModel(
        p, d, q, ar, ma, intercept=mean + scale * mu, sigma2=css / resid.size,
        log_css=math.log(css), n_obs=resid.size, residuals=resid,
    )
    return model


def forecast(m: ArimaModel, last_obs: AnnualSeries, horizon: int) -> AnnualSeries:
    """Point forecasts in levels, ``horizon`` years past ``last_obs``.

    Past innovations are rebuilt from ``last_obs`` by the CSS recursion;
    future innovations are zero.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    need = max(m.p, m.q) + m.d
    if len(last_obs) < max(need, 1):
        raise InsufficientContextError(
            f"ARIMA{m.order} forecasts need {max(need, 1)} trailing observations, got {len(last_obs)}"
        )
    y = last_obs.values
    w = np.diff(y, n=m.d) if m.d else y.copy()
    n = w.size
    eps = np.zeros(n + horizon)
    eps[m.p : n] = _css_residuals(w, m.intercept, m.ar_coeffs, m.ma_coeffs)
    x = np.concatenate((w - m.intercept, np.zeros(horizon)))
    for t in range(n, n + horizon):
        ar_part = sum(m.ar_coeffs[i] * x[t - 1 - i] for i in range(m.p))
        ma_part = sum(m.ma_coeffs[j] * eps[t - 1 - j] for j in range(m.q))
        x[t] = ar_part + ma_part
    path = x[n:] + m.intercept
    for k in reversed(range(m.d)):
        path = np.diff(y, n=k)[-1] + np.cumsum(path)
    return AnnualSeries(last_obs.end_year + 1, path, last_obs.unit_tag)


# ---------------------------------------------------------------------------
# order selection


@dataclass(frozen=True)
class OrderCandidate:
    p: int
    q: int
    aic: float
    converged: bool


def _grid_cell(args):
    values, start_year, p, d, q, p_max = args
    s = AnnualSeries(start_year, values)
    try:
        m = fit_arima(s, p, d, q)
    except NonConvergenceError:
        return OrderCandidate(p, q, math.inf, False)
    # compare every candidate on the innovations from t = p_max onwards
    e = m.residuals[p_max - p :]
    ssr = float(e @ e)
    aic = e.size * math.log(ssr / e.size) + 2 * (p + q + 1)
    return OrderCandidate(p, q, aic, True)


def rank_orders(
    s: AnnualSeries, p_max: int, d: int, q_max: int, jobs: int = 1
) -> list[OrderCandidate]:
    """AIC for every (p, q) on the grid, best first.

    Ties go to the smaller p + q, then the smaller q.
    """
    if len(s) < p_max + q_max + d + 10:
        raise InsufficientDataError(
            f"order search up to ({p_max},{q_max}) needs {p_max + q_max + d + 10} observations"
        )
    cells = [
        (s.values, s.start_year, p, d, q, p_max)
        for p, q in product(range(p_max + 1), range(q_max + 1))
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_grid_cell, cells))
    else:
        results = [_grid_cell(c) for c in cells]
    return sorted(results, key=lambda c: (c.aic, c.p + c.q, c.q))


def select_order(s: AnnualSeries, p_max: int, d: int, q_max: int, jobs: int = 1) -> tuple[int, int]:
    ranked = rank_orders(s, p_max, d, q_max, jobs=jobs)
    if not ranked[0].converged:
        raise SelectionFailureError("no candidate order converged")
    return ranked[0].p, ranked[0].q


def simulate_arma(
    n: int,
    ar=(),
    ma=(),
    sigma: float = 1.0,
    mean: float = 0.0,
    rng: np.random.Generator | None = None,
    burn: int = 200,
) -> np.ndarray:
    """Draw ``n`` values of x[t] - mean = sum(ar*x lags) + e[t] + sum(ma*e lags)."""
    rng = rng if rng is not None else np.random.default_rng()
    e = sigma * rng.standard_normal(n + burn)
    x = lfilter(np.concatenate(([1.0], ma)), np.concatenate(([1.0], -np.asarray(ar, float))), e)
    return x[burn:] + mean
