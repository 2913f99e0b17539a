"""CSV and scenario-file ingestion plus JSON / tidy-CSV emission.

SERIES CSV layout::

    # PIT: personal income tax, millions
    year,PIT,VAT,provenance
    2010,1591.7,6347.5,Table 6 row 2010

Lines starting with ``#`` are comments; ``# name: note`` records a
provenance note for a series. An optional ``provenance`` column holds free
text per row. Empty cells mean "series absent that year" and are only
allowed before a series' first or after its last value.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    ConfigurationError,
    DuplicateEntryError,
    MalformedHeaderError,
    MissingFileError,
    NonNumericCellError,
    YearGapError,
)
from .series import AnnualSeries, GrowthPath

PROVENANCE_COLUMN = "provenance"


@dataclass(frozen=True)
class Dataset:
    series: dict[str, AnnualSeries]
    provenance: dict[str, str] = field(default_factory=dict)
    row_notes: dict[int, str] = field(default_factory=dict)

    def __getitem__(self, name: str) -> AnnualSeries:
        try:
            return self.series[name]
        except KeyError:
            raise ConfigurationError(
                f"no series named {name!r}; available: {', '.join(self.series) or 'none'}"
            ) from None

    def __contains__(self, name: str) -> bool:
        return name in self.series

    @property
    def names(self) -> list[str]:
        return list(self.series)


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _read_lines(path) -> list[str]:
    p = Path(path)
    if not p.is_file():
        raise MissingFileError(f"no such file: {p}")
    return p.read_text(encoding="utf-8-sig").splitlines()


def parse_csv_text(lines: Iterable[str]) -> Dataset:
    notes: dict[str, str] = {}
    rows: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            name, sep, note = stripped[1:].partition(":")
            if sep and name.strip():
                notes[name.strip()] = note.strip()
            continue
        rows.append((lineno, next(csv.reader([line]))))
    if not rows:
        raise MalformedHeaderError("no header row", row=1)

    header_line, header = rows[0]
    header = [h.strip() for h in header]
    if not header or header[0].lower() != "year":
        raise MalformedHeaderError("first column must be 'year'", row=header_line)
    names = header[1:]
    if not names or any(not n for n in names):
        raise MalformedHeaderError("empty column name in header", row=header_line)
    if len(set(names)) != len(names):
        dup = next(n for n in names if names.count(n) > 1)
        raise MalformedHeaderError(f"column {dup!r} appears twice", row=header_line, column=dup)

    by_year: dict[int, tuple[int, list[str]]] = {}
    for lineno, cells in rows[1:]:
        cells = [c.strip() for c in cells]
        if len(cells) != len(header):
            raise MalformedHeaderError(
                f"row has {len(cells)} cells, header has {len(header)}", row=lineno
            )
        try:
            year = int(cells[0])
        except ValueError:
            raise NonNumericCellError(
                f"year {cells[0]!r} is not an integer", row=lineno, column="year"
            ) from None
        if year in by_year:
            raise DuplicateEntryError(
                f"year {year} appears twice (lines {by_year[year][0]} and {lineno})",
                row=lineno,
                column="year",
            )
        by_year[year] = (lineno, cells[1:])
    if not by_year:
        raise MalformedHeaderError("header present but no data rows", row=header_line)

    years = sorted(by_year)
    for prev, cur in zip(years, years[1:]):
        if cur != prev + 1:
            raise YearGapError(f"year {prev + 1} is missing", year=prev + 1)

    series: dict[str, AnnualSeries] = {}
    row_notes: dict[int, str] = {}
    for j, name in enumerate(names):
        if name.lower() == PROVENANCE_COLUMN:
            row_notes = {y: by_year[y][1][j] for y in years if by_year[y][1][j]}
            continue
        values: list[float | None] = []
        for y in years:
            lineno, cells = by_year[y]
            cell = cells[j]
            if cell == "":
                values.append(None)
                continue
            try:
                v = float(cell)
            except ValueError:
                raise NonNumericCellError(
                    f"{name} in {y}: {cell!r} is not a number", row=lineno, column=name
                ) from None
            if not math.isfinite(v):
                raise NonNumericCellError(f"{name} in {y}: {cell!r} is not finite", row=lineno, column=name)
            values.append(v)
        present = [i for i, v in enumerate(values) if v is not None]
        if not present:
            continue
        lo, hi = present[0], present[-1]
        hole = next((i for i in range(lo, hi + 1) if values[i] is None), None)
        if hole is not None:
            raise YearGapError(
                f"{name} has no value in {years[hole]}",
                year=years[hole],
                row=by_year[years[hole]][0],
                column=name,
            )
        series[name] = AnnualSeries(years[lo], values[lo : hi + 1])
    return Dataset(series, {k: v for k, v in notes.items() if k in series}, row_notes)


def load_csv(path) -> Dataset:
    return parse_csv_text(_read_lines(path))


def write_csv(path, series: Mapping[str, AnnualSeries], notes: Mapping[str, str] | None = None) -> None:
    """Inverse of ``load_csv`` for plain series (no provenance column)."""
    first = min(s.start_year for s in series.values())
    last = max(s.end_year for s in series.values())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for name, note in (notes or {}).items():
            fh.write(f"# {name}: {note}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["year", *series])
        for y in range(first, last + 1):
            row = [y]
            for s in series.values():
                row.append(repr(s.at(y)) if s.start_year <= y <= s.end_year else "")
            w.writerow(row)


# -- scenario files ---------------------------------------------------------


@dataclass
class ScenarioFile:
    target: str
    histories: dict[str, str]
    paths: dict[str, list[float]]
    horizon: int | None = None
    base_year: int | None = None
    intercept: bool = True
    window_start: int | None = None
    data: str | None = None


def _parse_bool(key: str, value: str) -> bool:
    low = value.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ConfigurationError(f"{key} must be true or false, got {value!r}")


def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigurationError(f"{key} must be an integer, got {value!r}") from None


def parse_scenario_text(lines: Iterable[str]) -> ScenarioFile:
    """Flat ``key=value`` format; see the README for the recognised keys."""
    target = None
    histories: dict[str, str] = {}
    paths: dict[str, list[float]] = {}
    extra: dict = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigurationError(f"line {lineno}: expected key=value, got {line!r}")
        if key == "target":
            target = value
        elif key.startswith("driver."):
            name, _, attr = key[len("driver.") :].rpartition(".")
            if not name:
                raise ConfigurationError(f"line {lineno}: driver key needs a name: {key!r}")
            if attr == "history":
                histories[name] = value
            elif attr == "path":
                try:
                    paths[name] = [float(v) for v in value.split(",") if v.strip()]
                except ValueError:
                    raise ConfigurationError(f"line {lineno}: bad growth path {value!r}") from None
            else:
                raise ConfigurationError(f"line {lineno}: unknown driver attribute {attr!r}")
        elif key in ("horizon", "base_year", "window_start"):
            extra[key] = _parse_int(key, value)
        elif key == "intercept":
            extra[key] = _parse_bool(key, value)
        elif key == "data":
            extra[key] = value
        else:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
    if target is None:
        raise ConfigurationError("scenario file has no target=")
    if not histories:
        raise ConfigurationError("scenario file declares no drivers")
    return ScenarioFile(target, histories, paths, **extra)


def load_scenario(path) -> ScenarioFile:
    sf = parse_scenario_text(_read_lines(path))
    if sf.data is not None and not Path(sf.data).is_absolute():
        sf.data = str(Path(path).parent / sf.data)
    return sf


def build_spec(sf: ScenarioFile, data: Dataset):
    """Turn a parsed scenario file plus data into a ``ScenarioSpec``."""
    from .scenario import ScenarioSpec

    drivers = [(name, data[col]) for name, col in sf.histories.items()]
    missing = [name for name in sf.histories if name not in sf.paths]
    if missing:
        raise ConfigurationError(f"driver {missing[0]!r} has no growth path")
    horizon = sf.horizon if sf.horizon is not None else min(len(p) for p in sf.paths.values())
    target = data[sf.target]
    spec = ScenarioSpec(
        target_name=sf.target,
        target=target,
        drivers=drivers,
        driver_paths={},
        horizon=horizon,
        base_year=sf.base_year,
        intercept=sf.intercept,
        window_start=sf.window_start,
    )
    paths = {name: GrowthPath(spec.base_year + 1, rates) for name, rates in sf.paths.items()}
    return dataclasses.replace(spec, driver_paths=paths)


# -- reports ----------------------------------------------------------------


def to_jsonable(obj):
    """Recursively convert results into plain JSON types.

    Non-finite floats become ``null``; tuple dict keys are joined with ``|``.
    """
    if isinstance(obj, AnnualSeries):
        return {"start_year": obj.start_year, "unit_tag": obj.unit_tag, "values": to_jsonable(obj.values)}
    if isinstance(obj, GrowthPath):
        return {"start_year": obj.start_year, "rates": to_jsonable(obj.rates)}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Mapping):
        return {
            ("|".join(map(str, k)) if isinstance(k, tuple) else str(k)): to_jsonable(v)
            for k, v in obj.items()
        }
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False)


PLOT_KINDS = ("actual", "fitted", "forecast")


def write_plot_csv(path, rows: Iterable[tuple[str, str, AnnualSeries]]) -> None:
    """Tidy ``series,year,value,kind`` rows for external plotting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["series", "year", "value", "kind"])
        for name, kind, s in rows:
            if kind not in PLOT_KINDS:
                raise ValueError(f"plot kind must be one of {PLOT_KINDS}")
            for y, v in zip(s.years, s.values):
                w.writerow([name, int(y), repr(float(v)), kind])
