"""Ordinary least squares via Householder QR, plus the nested-model F-test.

Used for the scenario regressions, the Dickey-Fuller regression and the
Granger restriction tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .distributions import f_sf
from .errors import ArityError, InsufficientDataError, InvalidNestingError, SingularDesignError

RANK_TOL = 1e-10
# F statistics above this are reported as the cap (perfect-fit limit).
F_STAT_CAP = 1e15


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    values: np.ndarray
    column_names: tuple[str, ...] = ()

    def __post_init__(self):
        x = np.array(self.values, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2:
            raise ValueError("design must be two-dimensional")
        names = tuple(self.column_names) or tuple(f"x{j}" for j in range(x.shape[1]))
        if len(names) != x.shape[1]:
            raise ArityError(f"{len(names)} names for {x.shape[1]} columns")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate column names in {names}")
        if not np.all(np.isfinite(x)):
            raise ValueError("design contains non-finite entries")
        for j in range(1, x.shape[1]):
            for i in range(j):
                if np.array_equal(x[:, i], x[:, j]):
                    raise SingularDesignError(
                        f"column {names[j]!r} duplicates column {names[i]!r}", column=names[j]
                    )
        x.setflags(write=False)
        object.__setattr__(self, "values", x)
        object.__setattr__(self, "column_names", names)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_columns(cls, columns: Mapping[str, Sequence[float]], intercept: bool = True):
        cols = {k: np.asarray(v, dtype=float) for k, v in columns.items()}
        n = len(next(iter(cols.values()))) if cols else 0
        if intercept:
            if "const" in cols:
                raise ValueError("'const' is reserved for the intercept column")
            cols = {"const": np.ones(n), **cols}
        if not cols:
            raise ArityError("a design needs at least one column")
        return cls(np.column_stack(list(cols.values())), tuple(cols))

    def has_intercept(self) -> bool:
        x = self.values
        return bool(np.any(np.all(x == x[:1], axis=0) & (x[0] != 0))) if x.shape[0] else False


@dataclass(frozen=True, eq=False)
class RegressionFit:
    beta: np.ndarray
    residuals: np.ndarray
    sigma2: float
    se_beta: np.ndarray
    r_squared: float
    n_obs: int
    n_params: int
    column_names: tuple[str, ...] = ()
    fitted: np.ndarray = field(default=None, repr=False)

    @property
    def ssr(self) -> float:
        return float(self.residuals @ self.residuals)

    @property
    def t_stats(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.beta / self.se_beta

    @property
    def aic(self) -> float:
        n = self.n_obs
        return n * np.log(self.ssr / n) + 2 * self.n_params

    def coef(self, name: str) -> float:
        return float(self.beta[self.column_names.index(name)])


@dataclass(frozen=True)
class FTestResult:
    f_stat: float
    df_num: int
    df_den: int
    p_value: float


def _auto_named(names: Sequence[str]) -> bool:
    return all(c.startswith("x") and c[1:].isdigit() for c in names)


def _as_design(X) -> DesignMatrix:
    return X if isinstance(X, DesignMatrix) else DesignMatrix(X)


def ols_fit(X: DesignMatrix | np.ndarray, y) -> RegressionFit:
    """Least-squares fit of ``y`` on the columns of ``X``.

    Raises SingularDesignError naming the first column whose QR pivot
    falls below ``RANK_TOL`` times the largest pivot.
    """
    X = _as_design(X)
    y = np.asarray(y, dtype=float).reshape(-1)
    n, k = X.values.shape
    if y.size != n:
        raise ArityError(f"design has {n} rows but y has {y.size} values")
    if not np.all(np.isfinite(y)):
        raise ValueError("y contains non-finite values")
    if n <= k:
        raise InsufficientDataError(f"{n} observations cannot identify {k} parameters with a residual variance")

    q, r = np.linalg.qr(X.values, mode="reduced")
    pivots = np.abs(np.diag(r))
    scale = pivots.max()
    low = np.flatnonzero(pivots <= RANK_TOL * scale) if scale > 0 else np.arange(k)
    if low.size:
        name = X.column_names[int(low[0])]
        raise SingularDesignError(f"design is rank deficient at column {name!r}", column=name)

    beta = solve_triangular(r, q.T @ y)
    fitted = X.values @ beta
    resid = y - fitted
    ssr = float(resid @ resid)
    dof = n - k
    sigma2 = ssr / dof
    r_inv = solve_triangular(r, np.eye(k))
    se = np.sqrt(sigma2 * np.sum(r_inv**2, axis=1))

    if X.has_intercept():
        sst = float(np.sum((y - y.mean()) ** 2))
    else:
        sst = float(y @ y)
    if sst > 0:
        r2 = 1.0 - ssr / sst
    else:
        r2 = 1.0 if ssr == 0 else 0.0
    for a in (beta, resid, se, fitted):
        a.setflags(write=False)
    return RegressionFit(
        beta=beta,
        residuals=resid,
        sigma2=sigma2,
        se_beta=se,
        r_squared=float(r2),
        n_obs=n,
        n_params=k,
        column_names=X.column_names,
        fitted=fitted,
    )


def predict(fit: RegressionFit, X_new: DesignMatrix | np.ndarray) -> np.ndarray:
    X_new = _as_design(X_new)
    if X_new.n_cols != fit.n_params:
        raise ArityError(f"fit has {fit.n_params} parameters, new design has {X_new.n_cols} columns")
    named = not (_auto_named(X_new.column_names) or _auto_named(fit.column_names))
    if named and X_new.column_names != fit.column_names:
        raise ArityError(
            f"column order {X_new.column_names} does not match fitted {fit.column_names}"
        )
    return X_new.values @ fit.beta


def f_test_nested(restricted: RegressionFit, unrestricted: RegressionFit) -> FTestResult:
    """F-test that the extra regressors of ``unrestricted`` have zero coefficients."""
    if restricted.n_obs != unrestricted.n_obs:
        raise InvalidNestingError("nested fits must share the same observations")
    q = unrestricted.n_params - restricted.n_params
    if q <= 0:
        raise InvalidNestingError("unrestricted model must have more parameters")
    ssr_r, ssr_u = restricted.ssr, unrestricted.ssr
    if ssr_r < ssr_u - 1e-10 * max(ssr_r, ssr_u):
        raise InvalidNestingError(
            f"restricted SSR {ssr_r:.6g} below unrestricted SSR {ssr_u:.6g}: models are not nested"
        )
    df_den = unrestricted.n_obs - unrestricted.n_params
    gain = max(ssr_r - ssr_u, 0.0)
    if gain == 0.0:
        f = 0.0
    elif ssr_u <= 0.0:
        f = F_STAT_CAP
    else:
        f = min((gain / q) / (ssr_u / df_den), F_STAT_CAP)
    return FTestResult(f_stat=float(f), df_num=q, df_den=df_den, p_value=f_sf(f, q, df_den))
