"""Year-indexed annual series and the transforms used throughout the pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ArityError, DivisionByZeroError, InsufficientDataError

UNIT_TAGS = ("level", "rate")


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AnnualSeries:
    """Contiguous yearly observations starting at ``start_year``.

    ``unit_tag`` is a label ("level" or "rate") and never changes arithmetic.
    """

    start_year: int
    values: np.ndarray
    unit_tag: str = "level"

    def __post_init__(self):
        object.__setattr__(self, "start_year", int(self.start_year))
        object.__setattr__(self, "values", _frozen_array(self.values))
        if self.values.size < 1:
            raise InsufficientDataError("an AnnualSeries needs at least one value")
        if not np.all(np.isfinite(self.values)):
            bad = self.start_year + int(np.flatnonzero(~np.isfinite(self.values))[0])
            raise ValueError(f"non-finite value in {bad}")
        if self.unit_tag not in UNIT_TAGS:
            raise ValueError(f"unit_tag must be one of {UNIT_TAGS}, got {self.unit_tag!r}")

    def __len__(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return (
            f"AnnualSeries({self.start_year}-{self.end_year}, "
            f"{self.unit_tag}, {np.array2string(self.values, precision=6)})"
        )

    @property
    def end_year(self) -> int:
        return self.start_year + self.values.size - 1

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.start_year, self.end_year + 1)

    def at(self, year: int) -> float:
        idx = int(year) - self.start_year
        if not 0 <= idx < self.values.size:
            raise KeyError(f"{year} outside {self.start_year}-{self.end_year}")
        return float(self.values[idx])

    def window(self, first: int, last: int) -> "AnnualSeries":
        """Sub-series covering ``first``..``last`` inclusive."""
        if first < self.start_year or last > self.end_year or last < first:
            raise InsufficientDataError(
                f"window {first}-{last} not inside {self.start_year}-{self.end_year}"
            )
        lo = first - self.start_year
        return AnnualSeries(first, self.values[lo : lo + last - first + 1], self.unit_tag)

    def tail(self, n: int) -> "AnnualSeries":
        n = min(int(n), len(self))
        return self.window(self.end_year - n + 1, self.end_year)

    def to_dict(self) -> dict[int, float]:
        return {int(y): float(v) for y, v in zip(self.years, self.values)}


@dataclass(frozen=True, eq=False)
class GrowthPath:
    """Year-on-year growth rates (fractions) starting at ``start_year``."""

    start_year: int
    rates: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        object.__setattr__(self, "start_year", int(self.start_year))
        object.__setattr__(self, "rates", _frozen_array(self.rates))
        if not np.all(np.isfinite(self.rates)):
            raise ValueError("growth rates must be finite")
        if np.any(self.rates <= -1.0):
            raise ValueError("growth rates must exceed -1")

    def __len__(self) -> int:
        return self.rates.size

    @property
    def end_year(self) -> int:
        return self.start_year + self.rates.size - 1

    def head(self, n: int) -> "GrowthPath":
        return GrowthPath(self.start_year, self.rates[:n])


def as_series(obj, start_year: int = 0, unit_tag: str = "level") -> AnnualSeries:
    if isinstance(obj, AnnualSeries):
        return obj
    return AnnualSeries(start_year, obj, unit_tag)


def difference(s: AnnualSeries, d: int = 1) -> AnnualSeries:
    """Apply the first-difference operator ``d`` times."""
    if d < 0:
        raise ValueError("d must be non-negative")
    if d == 0:
        return s
    if len(s) <= d:
        raise InsufficientDataError(f"cannot difference {len(s)} values {d} times")
    return AnnualSeries(s.start_year + d, np.diff(s.values, n=d), s.unit_tag)


def integrate(
    diffs: AnnualSeries | Sequence[float],
    anchors: Sequence[float],
    start_year: int | None = None,
    d: int | None = None,
) -> AnnualSeries:
    """Undo ``len(anchors)`` rounds of differencing.

    ``anchors`` are the first d values of the original series. ``diffs``
    may be empty (a plain sequence), in which case the anchors alone come back.
    Passing ``d`` makes the anchor count checked.
    """
    anchors = np.asarray(anchors, dtype=float).reshape(-1)
    if d is not None and d != anchors.size:
        raise ArityError(f"undoing d={d} differences needs {d} anchors, got {anchors.size}")
    d = anchors.size
    if isinstance(diffs, AnnualSeries):
        values = diffs.values
        unit_tag = diffs.unit_tag
        if start_year is None:
            start_year = diffs.start_year - d
    else:
        values = np.asarray(diffs, dtype=float).reshape(-1)
        unit_tag = "level"
        if start_year is None:
            start_year = 0
    if d == 0:
        if values.size == 0:
            raise InsufficientDataError("nothing to integrate")
        return AnnualSeries(start_year, values, unit_tag)

    # anchor k (k=0..d-1) is y_k; the first value of the k-th difference
    # at the start is Δ^k y_0, recovered from the anchors by differencing.
    heads = [np.diff(anchors, n=k)[0] for k in range(d)]
    out = values
    for k in reversed(range(d)):
        out = np.concatenate(([heads[k]], heads[k] + np.cumsum(out)))
    return AnnualSeries(start_year, out, unit_tag)


def pct_change(s: AnnualSeries) -> AnnualSeries:
    """Year-on-year growth ``s[t]/s[t-1] - 1`` tagged as a rate."""
    if len(s) < 2:
        raise InsufficientDataError("pct_change needs at least two values")
    prev = s.values[:-1]
    zero = np.flatnonzero(prev == 0.0)
    if zero.size:
        year = s.start_year + int(zero[0])
        raise DivisionByZeroError(f"zero level in {year}", year=year)
    return AnnualSeries(s.start_year + 1, s.values[1:] / prev - 1.0, "rate")


def apply_growth_path(base_level: float, path: GrowthPath) -> AnnualSeries:
    """Compound ``base_level`` through each rate of ``path``."""
    if not np.isfinite(base_level):
        raise ValueError("base level must be finite")
    if len(path) == 0:
        raise InsufficientDataError("empty growth path")
    return AnnualSeries(path.start_year, base_level * np.cumprod(1.0 + path.rates), "level")


def common_span(series: Iterable[AnnualSeries]) -> tuple[int, int]:
    """First and last year shared by every series."""
    series = list(series)
    first = max(s.start_year for s in series)
    last = min(s.end_year for s in series)
    return first, last
