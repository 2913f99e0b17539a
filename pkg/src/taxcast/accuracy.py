"""Forecast-error statistics, Theil's U1 and the Diebold-Mariano test.

Errors are ``actual - predicted``; percentage metrics are fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

import numpy as np

from .distributions import norm_sf_two_sided, t_sf_two_sided
from .errors import AlignmentError, DegenerateSeriesError, DivisionByZeroError, InsufficientDataError
from .series import AnnualSeries

LOSSES = ("squared", "absolute")


@dataclass(frozen=True)
class AccuracyReport:
    me: float
    mse: float
    rmse: float
    mae: float
    mpe: float
    mape: float
    smape: float
    theil_u1: float
    n: int

    def as_dict(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class DmResult:
    dm_stat: float
    p_value: float
    loss: str
    horizon: int
    small_sample_adjusted: bool


def _paired(actual: AnnualSeries, predicted: AnnualSeries) -> tuple[np.ndarray, np.ndarray]:
    if len(actual) != len(predicted):
        raise AlignmentError(f"actual has {len(actual)} values, predicted has {len(predicted)}")
    if actual.start_year != predicted.start_year:
        raise AlignmentError(
            f"actual starts in {actual.start_year}, predicted in {predicted.start_year}"
        )
    return actual.values, predicted.values


def theil_u1(actual: AnnualSeries, predicted: AnnualSeries) -> float:
    a, p = _paired(actual, predicted)
    denom = math.sqrt(np.mean(a**2)) + math.sqrt(np.mean(p**2))
    if denom == 0.0:
        raise DegenerateSeriesError("Theil's U1 is undefined when both series are zero")
    return math.sqrt(np.mean((a - p) ** 2)) / denom


def error_stats(
    actual: AnnualSeries, predicted: AnnualSeries, percentage: bool = True
) -> AccuracyReport:
    """ME, MSE, RMSE, MAE, MPE, MAPE, SMAPE and U1 for one forecast.

    With ``percentage=False`` zero actuals are tolerated and MPE/MAPE come
    back as NaN.
    """
    a, p = _paired(actual, predicted)
    e = a - p
    mse = float(np.mean(e**2))
    if percentage:
        zero = np.flatnonzero(a == 0.0)
        if zero.size:
            year = actual.start_year + int(zero[0])
            raise DivisionByZeroError(f"actual value is zero in {year}", year=year)
        rel = e / a
        mpe, mape = float(np.mean(rel)), float(np.mean(np.abs(rel)))
    else:
        mpe = mape = float("nan")
    half_sum = (np.abs(a) + np.abs(p)) / 2.0
    with np.errstate(invalid="ignore", divide="ignore"):
        # both zero means a perfect forecast for that year
        terms = np.where(half_sum > 0, np.abs(e) / half_sum, 0.0)
    return AccuracyReport(
        me=float(np.mean(e)),
        mse=mse,
        rmse=math.sqrt(mse),
        mae=float(np.mean(np.abs(e))),
        mpe=mpe,
        mape=mape,
        smape=float(np.mean(terms)),
        theil_u1=theil_u1(actual, predicted),
        n=int(e.size),
    )


def dm_test(
    errors_a,
    errors_b,
    horizon: int = 1,
    loss: str = "squared",
    small_sample_adjusted: bool = False,
) -> DmResult:
    """Diebold-Mariano test of equal accuracy for two error sequences.

    A negative statistic means forecast ``a`` has the smaller loss. The
    long-run variance uses rectangular weights up to lag ``horizon - 1``;
    if that estimate is not positive the lag-0 variance is used instead.
    """
    ea = np.asarray(errors_a, dtype=float).reshape(-1)
    eb = np.asarray(errors_b, dtype=float).reshape(-1)
    if ea.size != eb.size:
        raise AlignmentError(f"error sequences differ in length ({ea.size} vs {eb.size})")
    n = ea.size
    if n < 4:
        raise InsufficientDataError("the DM test needs at least 4 paired errors")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if loss == "squared":
        d = ea**2 - eb**2
    elif loss == "absolute":
        d = np.abs(ea) - np.abs(eb)
    else:
        raise ValueError(f"loss must be one of {LOSSES}")

    mean = float(np.mean(d))
    dc = d - mean
    gamma0 = float(dc @ dc) / n
    if gamma0 == 0.0:
        return DmResult(0.0, 1.0, loss, horizon, small_sample_adjusted)
    lrv = gamma0 + 2.0 * sum(float(dc[k:] @ dc[:-k]) / n for k in range(1, min(horizon, n)))
    if lrv <= 0.0:
        lrv = gamma0
    stat = mean / math.sqrt(lrv / n)
    if small_sample_adjusted:
        h = horizon
        stat *= math.sqrt((n + 1 - 2 * h + h * (h - 1) / n) / n)
        p = t_sf_two_sided(stat, n - 1)
    else:
        p = norm_sf_two_sided(stat)
    return DmResult(float(stat), float(min(max(p, 0.0), 1.0)), loss, horizon, small_sample_adjusted)


@dataclass(frozen=True)
class ModelComparison:
    reports: dict[str, AccuracyReport]
    ranking: list[str]
    dm: dict[tuple[str, str], DmResult]


def compare_models(
    actual: AnnualSeries,
    named_predictions: Mapping[str, AnnualSeries],
    horizon: int = 1,
    loss: str = "squared",
    small_sample_adjusted: bool = False,
) -> ModelComparison:
    """Accuracy report per model, ranking by RMSE and pairwise DM tests.

    Equal RMSEs keep the input order.
    """
    reports = {name: error_stats(actual, pred) for name, pred in named_predictions.items()}
    ranking = sorted(reports, key=lambda name: reports[name].rmse)
    errors = {name: actual.values - pred.values for name, pred in named_predictions.items()}
    dm = {
        (a, b): dm_test(errors[a], errors[b], horizon, loss, small_sample_adjusted)
        for a, b in combinations(named_predictions, 2)
    }
    return ModelComparison(reports, ranking, dm)
