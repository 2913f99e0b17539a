"""Conditional ("policy scenario") revenue forecasts.

A target revenue series is regressed on contemporaneous driver levels;
drivers are then pushed forward along assumed growth paths and the fitted
relationship turns them into projected revenue. Granger screening runs on
first differences, the regression on levels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .causality import GrangerResult, granger_test
from .errors import ConfigurationError, InsufficientDataError
from .linreg import DesignMatrix, RegressionFit, ols_fit, predict
from .series import AnnualSeries, GrowthPath, apply_growth_path, common_span, difference


@dataclass(frozen=True, eq=False)
class ScenarioSpec:
    target_name: str
    target: AnnualSeries
    drivers: Sequence[tuple[str, AnnualSeries]]
    driver_paths: Mapping[str, GrowthPath]
    horizon: int
    base_year: int | None = None
    intercept: bool = True
    window_start: int | None = None

    def __post_init__(self):
        drivers = tuple((str(n), s) for n, s in self.drivers)
        names = [n for n, _ in drivers]
        if not drivers:
            raise ConfigurationError("a scenario needs at least one driver")
        if len(set(names)) != len(names):
            raise ConfigurationError(f"duplicate driver names in {names}")
        if self.target_name in names or "const" in names:
            raise ConfigurationError("driver names must differ from the target and from 'const'")
        if self.horizon < 1:
            raise ConfigurationError("horizon must be at least 1")
        first, last = common_span([self.target] + [s for _, s in drivers])
        if first > last:
            raise ConfigurationError("target and drivers share no historical years")
        if self.base_year is not None and int(self.base_year) != last:
            raise ConfigurationError(
                f"base_year {self.base_year} is not the last common historical year ({last})"
            )
        start = first if self.window_start is None else int(self.window_start)
        if start < first or start > last:
            raise ConfigurationError(f"window start {start} outside the common span {first}-{last}")
        object.__setattr__(self, "drivers", drivers)
        object.__setattr__(self, "driver_paths", dict(self.driver_paths))
        object.__setattr__(self, "base_year", last)
        object.__setattr__(self, "window_start", start)

    @property
    def driver_names(self) -> list[str]:
        return [n for n, _ in self.drivers]

    def driver(self, name: str) -> AnnualSeries:
        return dict(self.drivers)[name]

    def design(self, first: int, last: int) -> DesignMatrix:
        cols = {name: s.window(first, last).values for name, s in self.drivers}
        return DesignMatrix.from_columns(cols, intercept=self.intercept)


@dataclass(frozen=True, eq=False)
class ScenarioForecast:
    target_name: str
    base_year: int
    fitted: RegressionFit
    in_sample_predicted: AnnualSeries
    residuals: AnnualSeries
    projected_levels: AnnualSeries
    driver_levels: dict[str, AnnualSeries]
    granger_screen: dict[str, GrangerResult] = field(default_factory=dict)

    @property
    def actual(self) -> AnnualSeries:
        return AnnualSeries(
            self.in_sample_predicted.start_year,
            self.in_sample_predicted.values + self.residuals.values,
        )


@dataclass(frozen=True)
class GrowthSummary:
    base_year: int
    base_value: float
    yearly: dict[int, float]
    cumulative: float


def screen_drivers(spec: ScenarioSpec, max_lag: int = 1, d: int = 1) -> dict[str, GrangerResult]:
    """Granger test of every driver against the target on ``d``-th differences.

    Drivers that fail are reported, never dropped.
    """
    target = difference(spec.target, d)
    return {
        name: granger_test(difference(s, d), target, max_lag, names=(name, spec.target_name))
        for name, s in spec.drivers
    }


def fit_scenario(spec: ScenarioSpec) -> RegressionFit:
    """OLS of target levels on driver levels over the estimation window."""
    first, last = spec.window_start, spec.base_year
    n = last - first + 1
    k = len(spec.drivers) + int(spec.intercept)
    if n < k + 3:
        raise InsufficientDataError(f"{n} common years cannot support {k} coefficients (need {k + 3})")
    return ols_fit(spec.design(first, last), spec.target.window(first, last).values)


def project(
    spec: ScenarioSpec,
    fit: RegressionFit,
    granger_screen: Mapping[str, GrangerResult] | None = None,
    from_year: int | None = None,
) -> ScenarioForecast:
    """Grow each driver from its ``from_year`` level and apply the fitted law.

    ``from_year`` defaults to the base year; earlier years allow replaying
    history through the same code path.
    """
    origin = spec.base_year if from_year is None else int(from_year)
    levels: dict[str, AnnualSeries] = {}
    for name, hist in spec.drivers:
        path = spec.driver_paths.get(name)
        if path is None:
            raise ConfigurationError(f"driver {name!r} has no growth path")
        if path.start_year != origin + 1:
            raise ConfigurationError(
                f"path for {name!r} starts in {path.start_year}, expected {origin + 1}"
            )
        if len(path) < spec.horizon:
            raise ConfigurationError(
                f"path for {name!r} covers {len(path)} years, horizon is {spec.horizon}"
            )
        levels[name] = apply_growth_path(hist.at(origin), path.head(spec.horizon))

    cols = {name: levels[name].values for name in spec.driver_names}
    future = predict(fit, DesignMatrix.from_columns(cols, intercept=spec.intercept))
    first = spec.window_start
    return ScenarioForecast(
        target_name=spec.target_name,
        base_year=origin,
        fitted=fit,
        in_sample_predicted=AnnualSeries(first, fit.fitted),
        residuals=AnnualSeries(first, fit.residuals),
        projected_levels=AnnualSeries(origin + 1, future),
        driver_levels=levels,
        granger_screen=dict(granger_screen or {}),
    )


def summarize_growth(f: ScenarioForecast, base: str = "fitted") -> GrowthSummary:
    """Year-on-year growth of the projection and cumulative change vs the base year.

    ``base="fitted"`` measures from the in-sample prediction for the base
    year; ``base="actual"`` from the observed value.
    """
    source = {"fitted": f.in_sample_predicted, "actual": f.actual}.get(base)
    if source is None:
        raise ValueError("base must be 'fitted' or 'actual'")
    base_value = source.at(f.base_year)
    path = np.concatenate(([base_value], f.projected_levels.values))
    growth = path[1:] / path[:-1] - 1.0
    return GrowthSummary(
        base_year=f.base_year,
        base_value=float(base_value),
        yearly={int(y): float(g) for y, g in zip(f.projected_levels.years, growth)},
        cumulative=float(path[-1] / base_value - 1.0),
    )
