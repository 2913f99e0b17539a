"""Augmented Dickey-Fuller unit-root testing and differencing-order choice."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSeriesError,
    InsufficientDataError,
    NonRejectionWarning,
    SingularDesignError,
)
from .linreg import DesignMatrix, RegressionFit, ols_fit
from .series import AnnualSeries, difference

DETERMINISTIC = ("none", "constant", "constant_and_trend")
LAG_SELECTION = ("fixed", "aic")
LEVELS = ("1%", "5%", "10%")

# Response-surface coefficients (MacKinnon 2010, one variable):
# cv(T) = b0 + b1/T + b2/T^2 + b3/T^3 for T regression observations.
CRITICAL_SURFACE = {
    "none": {
        "1%": (-2.56574, -2.2358, -3.627, 0.0),
        "5%": (-1.94100, -0.2686, -3.365, 31.223),
        "10%": (-1.61682, 0.2656, -2.714, 25.364),
    },
    "constant": {
        "1%": (-3.43035, -6.5393, -16.786, -79.433),
        "5%": (-2.86154, -2.8903, -4.234, -40.040),
        "10%": (-2.56677, -1.5384, -2.809, 0.0),
    },
    "constant_and_trend": {
        "1%": (-3.95877, -9.0531, -28.428, -134.155),
        "5%": (-3.41049, -4.3904, -9.036, -45.374),
        "10%": (-3.12705, -2.5856, -3.925, -22.380),
    },
}


def schwert_max_lag(n: int) -> int:
    return int(math.floor(12.0 * (n / 100.0) ** 0.25))


def critical_values(deterministic: str, n_obs: int) -> dict[str, float]:
    """Dickey-Fuller tau critical values for a regression on ``n_obs`` rows."""
    if deterministic not in CRITICAL_SURFACE:
        raise ValueError(f"deterministic must be one of {DETERMINISTIC}")
    t = float(n_obs)
    return {
        lvl: b0 + b1 / t + b2 / t**2 + b3 / t**3
        for lvl, (b0, b1, b2, b3) in CRITICAL_SURFACE[deterministic].items()
    }


def normalize_level(alpha) -> str:
    if isinstance(alpha, str):
        key = alpha.strip()
        if not key.endswith("%"):
            key = f"{float(key) * 100:g}%"
    else:
        key = f"{float(alpha) * 100:g}%"
    if key not in LEVELS:
        raise ValueError(f"significance must be one of {LEVELS}, got {alpha!r}")
    return key


@dataclass(frozen=True)
class AdfSpec:
    deterministic: str = "constant"
    max_lag: int | None = None  # None: Schwert rule on the series length
    lag_selection: str = "aic"

    def __post_init__(self):
        if self.deterministic not in DETERMINISTIC:
            raise ValueError(f"deterministic must be one of {DETERMINISTIC}")
        if self.lag_selection not in LAG_SELECTION:
            raise ValueError(f"lag_selection must be one of {LAG_SELECTION}")
        if self.max_lag is not None and self.max_lag < 0:
            raise ValueError("max_lag must be non-negative")

    def resolved_max_lag(self, n: int) -> int:
        if self.max_lag is not None:
            return self.max_lag
        # keep the default feasible on short series
        return max(0, min(schwert_max_lag(n), n - 12))


@dataclass(frozen=True)
class AdfResult:
    tau_stat: float
    chosen_lag: int
    critical_values: dict[str, float]
    reject_at: dict[str, bool]
    n_effective: int
    deterministic: str = "constant"
    regression: RegressionFit | None = field(default=None, repr=False, compare=False)


def _adf_design(y: np.ndarray, lag: int, first: int, deterministic: str):
    """Rows of the ADF regression for Δy[t], t = first..n-2 (indexing Δy)."""
    dy = np.diff(y)
    rows = np.arange(first, dy.size)
    cols: dict[str, np.ndarray] = {}
    if deterministic != "none":
        cols["const"] = np.ones(rows.size)
    if deterministic == "constant_and_trend":
        cols["trend"] = rows + 1.0
    cols["y_lag1"] = y[rows]
    for i in range(1, lag + 1):
        cols[f"dy_lag{i}"] = dy[rows - i]
    return DesignMatrix.from_columns(cols, intercept=False), dy[rows]


def _aic_lag(x: np.ndarray, dep: np.ndarray, max_lag: int) -> int:
    # lagged differences are the trailing columns, so lag k keeps the first
    # n_cols - (max_lag - k) columns; all candidates share the same rows
    n = dep.size
    best_aic, best_k = np.inf, 0
    for k in range(max_lag + 1):
        sub = x[:, : x.shape[1] - (max_lag - k)]
        q, _ = np.linalg.qr(sub)
        resid = dep - q @ (q.T @ dep)
        with np.errstate(divide="ignore"):
            aic = n * np.log(resid @ resid / n) + 2 * sub.shape[1]
        if aic < best_aic - 1e-12:
            best_aic, best_k = aic, k
    return best_k


def adf_test(s: AnnualSeries, spec: AdfSpec | None = None) -> AdfResult:
    """ADF regression of Δy on deterministic terms, y[t-1] and lagged Δy.

    The statistic is the t-ratio of the y[t-1] coefficient. Under
    ``lag_selection="aic"`` every candidate lag is fitted on the same rows.
    """
    spec = spec or AdfSpec()
    y = np.asarray(s.values, dtype=float)
    n = y.size
    max_lag = spec.resolved_max_lag(n)
    if n < max_lag + 12:
        raise InsufficientDataError(
            f"ADF with max_lag={max_lag} needs at least {max_lag + 12} observations, got {n}"
        )
    if np.ptp(y) == 0.0:
        raise DegenerateSeriesError("constant series has no unit-root test")

    if spec.lag_selection == "fixed":
        lag, first = max_lag, max_lag
    else:
        first = max_lag
        X, dep = _adf_design(y, max_lag, first, spec.deterministic)
        lag = _aic_lag(X.values, dep, max_lag)

    X, dep = _adf_design(y, lag, first, spec.deterministic)
    try:
        fit = ols_fit(X, dep)
    except SingularDesignError as exc:
        raise DegenerateSeriesError(f"ADF design is singular ({exc}); series is deterministic") from exc
    if fit.ssr <= 1e-24 * max(float(dep @ dep), 1.0):
        raise DegenerateSeriesError("ADF regression fits exactly; series is deterministic")
    j = fit.column_names.index("y_lag1")
    tau = float(fit.beta[j] / fit.se_beta[j])
    cvs = critical_values(spec.deterministic, fit.n_obs)
    return AdfResult(
        tau_stat=tau,
        chosen_lag=lag,
        critical_values=cvs,
        reject_at={lvl: bool(tau < cv) for lvl, cv in cvs.items()},
        n_effective=fit.n_obs,
        deterministic=spec.deterministic,
        regression=fit,
    )


def recommend_d(s: AnnualSeries, alpha="5%", spec: AdfSpec | None = None) -> int:
    """Smallest d in {0, 1, 2} whose d-th difference rejects a unit root.

    Returns 2 and emits NonRejectionWarning if no order rejects.
    """
    level = normalize_level(alpha)
    for d in range(3):
        if adf_test(difference(s, d), spec).reject_at[level]:
            return d
    warnings.warn(
        f"no differencing order up to 2 rejects a unit root at {level}",
        NonRejectionWarning,
        stacklevel=2,
    )
    return 2


# ---------------------------------------------------------------------------
# Monte-Carlo oracle for the critical values


def simulate_tau(
    deterministic: str, n_obs: int, reps: int, seed: int = 42, batch: int = 10_000
) -> np.ndarray:
    """Dickey-Fuller tau statistics of ``reps`` simulated random walks.

    Each walk yields a zero-lag DF regression with ``n_obs`` rows. Batches
    draw from child seeds spawned off ``seed`` so results do not depend on
    the batch layout being run in parallel.
    """
    if deterministic not in DETERMINISTIC:
        raise ValueError(f"deterministic must be one of {DETERMINISTIC}")
    t = n_obs
    z_cols = []
    if deterministic != "none":
        z_cols.append(np.ones(t))
    if deterministic == "constant_and_trend":
        z_cols.append(np.arange(1.0, t + 1))
    if z_cols:
        z = np.column_stack(z_cols)
        annihilator = np.eye(t) - z @ np.linalg.solve(z.T @ z, z.T)
    else:
        annihilator = np.eye(t)
    df = t - len(z_cols) - 1

    n_batches = -(-reps // batch)
    children = np.random.SeedSequence(seed).spawn(n_batches)
    out = np.empty(reps)
    for b, child in enumerate(children):
        m = min(batch, reps - b * batch)
        rng = np.random.default_rng(child)
        eps = rng.standard_normal((m, t + 1))
        walk = np.cumsum(eps, axis=1)
        lagged = walk[:, :-1] @ annihilator
        dy = np.diff(walk, axis=1) @ annihilator
        sxx = np.einsum("ij,ij->i", lagged, lagged)
        sxy = np.einsum("ij,ij->i", lagged, dy)
        coef = sxy / sxx
        resid = dy - coef[:, None] * lagged
        s2 = np.einsum("ij,ij->i", resid, resid) / df
        out[b * batch : b * batch + m] = coef / np.sqrt(s2 / sxx)
    return out


def monte_carlo_critical_values(
    deterministic: str, n_obs: int, reps: int = 50_000, seed: int = 42
) -> dict[str, float]:
    taus = simulate_tau(deterministic, n_obs, reps, seed)
    return {lvl: float(np.quantile(taus, float(lvl[:-1]) / 100.0)) for lvl in LEVELS}
