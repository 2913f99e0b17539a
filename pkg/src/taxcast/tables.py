"""Bundled Bulgarian PIT/VAT fixtures and the series reconstructed from them.

The printed tables give predicted revenue, regression residuals, yearly
changes in SOC and PEN and driver growth rates, but not the underlying
levels. The helpers below rebuild what is needed:

* predicted PIT from the chain of printed yearly changes (more digits than
  the rounded levels), anchored to the printed 2010-2019 levels;
* actual PIT as predicted + residual (or minus, see ``RESIDUAL_SIGNS``);
* SOC and PEN levels from their printed changes, with the 2010 level implied
  by change / growth rate;
* WAGE as an index (2010 = 100) compounded from its growth rates.

All money figures are millions.
"""

from __future__ import annotations

import csv
from importlib import resources

import numpy as np

from .io import Dataset, parse_csv_text
from .scenario import ScenarioSpec
from .series import AnnualSeries, GrowthPath

RESIDUAL_SIGNS = ("actual_minus_predicted", "predicted_minus_actual")
HISTORY = (2010, 2019)
PIT_DRIVERS = ("SOC", "WAGE", "PEN")


def _fixture_lines(name: str) -> list[str]:
    return resources.files("taxcast").joinpath("fixtures").joinpath(name).read_text("utf-8").splitlines()


def fixture_path(name: str):
    return resources.files("taxcast").joinpath("fixtures").joinpath(name)


def load_table6() -> Dataset:
    return parse_csv_text(_fixture_lines("table6.csv"))


def load_table4() -> Dataset:
    return parse_csv_text(_fixture_lines("table4.csv"))


def load_table3c() -> Dataset:
    return parse_csv_text(_fixture_lines("table3c.csv"))


def load_table5() -> dict[str, dict[str, dict[str, float]]]:
    """``{panel: {model: {metric: value}}}``."""
    out: dict = {}
    for row in csv.DictReader(_fixture_lines("table5.csv")):
        out.setdefault(row["panel"], {}).setdefault(row["model"], {})[row["metric"]] = float(row["value"])
    return out


def _check_sign(sign: str) -> float:
    if sign not in RESIDUAL_SIGNS:
        raise ValueError(f"sign must be one of {RESIDUAL_SIGNS}")
    return 1.0 if sign == RESIDUAL_SIGNS[0] else -1.0


def predicted_pit() -> AnnualSeries:
    """Predicted PIT 2010-2022 from the chain of printed yearly changes."""
    t6 = load_table6()
    printed = t6["PIT_pred"]
    delta = t6["PIT_pred_delta"]
    chain = np.concatenate(([0.0], np.cumsum(delta.values)))
    lo, hi = HISTORY
    offset = float(np.median(printed.window(lo, hi).values - chain[: hi - lo + 1]))
    return AnnualSeries(printed.start_year, offset + chain)


def pit_history(sign: str = "actual_minus_predicted") -> AnnualSeries:
    s = _check_sign(sign)
    pred = predicted_pit().window(*HISTORY)
    resid = load_table6()["PIT_resid"].window(*HISTORY)
    return AnnualSeries(pred.start_year, pred.values + s * resid.values)


def vat_history(sign: str = "actual_minus_predicted") -> AnnualSeries:
    s = _check_sign(sign)
    t6 = load_table6()
    pred = t6["VAT_pred"].window(*HISTORY)
    resid = t6["VAT_resid"].window(*HISTORY)
    return AnnualSeries(pred.start_year, pred.values + s * resid.values)


def _level_from_changes(delta: AnnualSeries, growth: AnnualSeries) -> AnnualSeries:
    # delta_t = g_t * level_{t-1}; every historical year implies a 2010
    # level, the median of those is used as the anchor.
    lo, hi = HISTORY
    d = delta.window(lo + 1, hi).values
    g = growth.window(lo + 1, hi).values
    before = np.concatenate(([0.0], np.cumsum(d)[:-1]))
    anchor = float(np.median(d / g - before))
    return AnnualSeries(lo, anchor + np.concatenate(([0.0], np.cumsum(d))))


def pit_drivers() -> dict[str, AnnualSeries]:
    """SOC, WAGE and PEN histories for 2010-2019."""
    t6, t4 = load_table6(), load_table4()
    lo, hi = HISTORY
    wage_growth = t4["WAGE_growth"].window(lo + 1, hi).values
    return {
        "SOC": _level_from_changes(t6["SOC_delta"], t4["SOC_growth"]),
        "WAGE": AnnualSeries(lo, 100.0 * np.concatenate(([1.0], np.cumprod(1.0 + wage_growth)))),
        "PEN": _level_from_changes(t6["PEN_delta"], t4["PEN_growth"]),
    }


def pit_paths(horizon: int = 3) -> dict[str, GrowthPath]:
    t4 = load_table4()
    first = HISTORY[1] + 1
    return {
        name: GrowthPath(first, t4[f"{name}_growth"].window(first, first + horizon - 1).values)
        for name in PIT_DRIVERS
    }


def pit_scenario_spec(intercept: bool = True, sign: str = "actual_minus_predicted") -> ScenarioSpec:
    drivers = pit_drivers()
    return ScenarioSpec(
        target_name="PIT",
        target=pit_history(sign),
        drivers=[(name, drivers[name]) for name in PIT_DRIVERS],
        driver_paths=pit_paths(),
        horizon=3,
        intercept=intercept,
    )


def table5_predictions(panel: str, actual: AnnualSeries) -> dict[str, AnnualSeries]:
    """Prediction series whose errors reproduce Table 5's ME and MSE.

    Regression predictions come from the printed residuals. The other
    models get errors ``ME + s * z`` with ``z`` alternating +1/-1 and
    ``s = sqrt(MSE - ME^2)``, which matches ME and MSE exactly for an even
    number of years.
    """
    stats = load_table5()[panel]
    resid = load_table6()[f"{panel}_resid"].window(actual.start_year, actual.end_year).values
    n = len(actual)
    z = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    out = {"Regression": AnnualSeries(actual.start_year, actual.values - resid)}
    for model in ("ARIMA", "Official"):
        me, mse = stats[model]["ME"], stats[model]["MSE"]
        errors = me + np.sqrt(mse - me * me) * z
        out[model] = AnnualSeries(actual.start_year, actual.values - errors)
    return out
