"""Granger-causality screening through nested OLS regressions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, InsufficientDataError
from .linreg import DesignMatrix, FTestResult, f_test_nested, ols_fit
from .series import AnnualSeries, common_span


@dataclass(frozen=True)
class GrangerResult:
    direction: tuple[str, str]
    max_lag: int
    f_test: FTestResult

    @property
    def causal_at_5pct(self) -> bool:
        return self.f_test.p_value < 0.05


def align(x: AnnualSeries, y: AnnualSeries) -> tuple[AnnualSeries, AnnualSeries]:
    """Trim both series to their shared years."""
    first, last = common_span((x, y))
    if first > last:
        raise AlignmentError(
            f"no common years between {x.start_year}-{x.end_year} and {y.start_year}-{y.end_year}"
        )
    return x.window(first, last), y.window(first, last)


def _lags(v: np.ndarray, max_lag: int, prefix: str) -> dict[str, np.ndarray]:
    n = v.size
    return {f"{prefix}_lag{i}": v[max_lag - i : n - i] for i in range(1, max_lag + 1)}


def granger_test(
    x: AnnualSeries,
    y: AnnualSeries,
    max_lag: int = 1,
    names: tuple[str, str] = ("x", "y"),
) -> GrangerResult:
    """Does ``x`` help predict ``y`` beyond ``y``'s own lags?

    Both inputs should already be stationary; nothing is differenced here.
    """
    if max_lag < 1:
        raise ValueError("max_lag must be at least 1")
    x, y = align(x, y)
    n = len(y)
    if n < 3 * max_lag + 10:
        raise InsufficientDataError(
            f"Granger test with max_lag={max_lag} needs {3 * max_lag + 10} aligned years, got {n}"
        )
    target = y.values[max_lag:]
    own = _lags(y.values, max_lag, names[1])
    other = _lags(x.values, max_lag, names[0])
    if names[0] == names[1]:
        other = {f"cause_{k}": v for k, v in other.items()}
    restricted = ols_fit(DesignMatrix.from_columns(own), target)
    unrestricted = ols_fit(DesignMatrix.from_columns({**own, **other}), target)
    return GrangerResult(
        direction=(names[0], names[1]),
        max_lag=max_lag,
        f_test=f_test_nested(restricted, unrestricted),
    )
