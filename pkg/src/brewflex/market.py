"""Hourly market/weather series ingestion, validation and energy accounting.

All series are UTC, hour-aligned and contiguous.  Prices are DKK/MWh, CO2
intensity g/kWh, ambient temperature degrees C.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError

HOUR = timedelta(hours=1)

KINDS = ("price", "co2", "ambient")
AREAS = ("DK1", "DK2", "national")

# inclusive value bounds per kind; price may be negative and is unbounded
_KIND_BOUNDS = {
    "co2": (0.0, float("inf")),
    "ambient": (-40.0, 50.0),
}


def _parse_timestamp(raw: str) -> datetime:
    text = raw.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class HourlySeries:
    """A contiguous run of hourly values for one area."""

    area: str
    kind: str
    start: datetime  # UTC, hour aligned
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValidationError(f"unknown series kind {self.kind!r}")
        if self.area not in AREAS:
            raise ValidationError(f"unknown area {self.area!r}")
        if self.start.tzinfo is None or self.start.utcoffset() != timedelta(0):
            raise ValidationError("series start must be an aware UTC timestamp")
        if self.start.minute or self.start.second or self.start.microsecond:
            raise ValidationError(f"series start not hour-aligned: {self.start}")
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or len(values) == 0:
            raise ValidationError("series values must be a non-empty 1-D array")
        if not np.all(np.isfinite(values)):
            idx = int(np.flatnonzero(~np.isfinite(values))[0])
            raise ValidationError(
                f"non-finite value at {_format_timestamp(self.timestamp_at(idx))}"
            )
        bounds = _KIND_BOUNDS.get(self.kind)
        if bounds is not None:
            lo, hi = bounds
            bad = np.flatnonzero((values < lo) | (values > hi))
            if len(bad):
                idx = int(bad[0])
                raise ValidationError(
                    f"{self.kind} value {values[idx]} out of range [{lo}, {hi}] "
                    f"at {_format_timestamp(self.timestamp_at(idx))}"
                )

    def __len__(self) -> int:
        return len(self.values)

    @property
    def end(self) -> datetime:
        """Exclusive end of the covered span."""
        return self.start + HOUR * len(self.values)

    def timestamp_at(self, index: int) -> datetime:
        return self.start + HOUR * index

    def index_of(self, t: datetime) -> int:
        """Index of the hour slot containing ``t`` (floor to hour)."""
        if t.tzinfo is None:
            raise ValidationError("timestamp must be timezone-aware")
        offset = (t - self.start) // HOUR
        if offset < 0 or offset >= len(self.values):
            raise ValidationError(
                f"timestamp {_format_timestamp(t)} outside series span "
                f"[{_format_timestamp(self.start)}, {_format_timestamp(self.end)})"
            )
        return int(offset)


def value_at(series: HourlySeries, t: datetime) -> float:
    """Value of the hour slot containing ``t``."""
    return float(series.values[series.index_of(t)])


def hours_in_year(year: int) -> int:
    start = datetime(year, 1, 1, tzinfo=timezone.utc)
    end = datetime(year + 1, 1, 1, tzinfo=timezone.utc)
    return int((end - start) // HOUR)


def year_start(year: int) -> datetime:
    return datetime(year, 1, 1, tzinfo=timezone.utc)


def validate_year(series: HourlySeries, year: int) -> None:
    """Require the series to cover exactly the given calendar year."""
    if series.start != year_start(year) or len(series) != hours_in_year(year):
        raise ValidationError(
            f"{series.kind}/{series.area} series does not cover year {year}: "
            f"starts {_format_timestamp(series.start)}, {len(series)} hours"
        )


def load_hourly_csv(path: str | Path, kind: str, area: str) -> HourlySeries:
    """Load and validate a ``timestamp,value`` CSV into an :class:`HourlySeries`."""
    path = Path(path)
    timestamps: list[datetime] = []
    values: list[float] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if [h.strip() for h in header] != ["timestamp", "value"]:
            raise ParseError(f"{path}: expected header 'timestamp,value', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ParseError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                ts = _parse_timestamp(row[0])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad timestamp {row[0]!r}: {exc}") from None
            if ts.minute or ts.second or ts.microsecond:
                raise ValidationError(
                    f"{path}:{lineno}: timestamp not hour-aligned: {_format_timestamp(ts)}"
                )
            try:
                value = float(row[1])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad value {row[1]!r}") from None
            if timestamps:
                expected = timestamps[-1] + HOUR
                if ts == timestamps[-1]:
                    raise ValidationError(
                        f"{path}:{lineno}: duplicate timestamp {_format_timestamp(ts)}"
                    )
                if ts != expected:
                    raise ValidationError(
                        f"{path}:{lineno}: gap or misordering, expected "
                        f"{_format_timestamp(expected)}, got {_format_timestamp(ts)}"
                    )
            timestamps.append(ts)
            values.append(value)
    if not timestamps:
        raise ValidationError(f"{path}: series contains no rows")
    return HourlySeries(area=area, kind=kind, start=timestamps[0], values=np.array(values))


def save_hourly_csv(series: HourlySeries, path: str | Path) -> None:
    """Write a series back out; floats use repr so a reload is bit-exact."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", "value"])
        for i, v in enumerate(series.values):
            writer.writerow([_format_timestamp(series.timestamp_at(i)), repr(float(v))])


@dataclass(frozen=True)
class EnergyAccount:
    load: np.ndarray = field(repr=False)  # kWh per hour
    cost: float                           # DKK
    emissions: float                      # kg CO2

    @property
    def total_load(self) -> float:
        return float(np.sum(self.load))


def account(load, price: HourlySeries, co2: HourlySeries) -> EnergyAccount:
    """Price and carbon-account an hourly kWh load profile.

    cost = sum(load_k * price_k) / 1000 (price is per MWh);
    emissions = sum(load_k * co2_k) / 1000 (co2 is g/kWh, result kg).
    """
    load = np.asarray(load, dtype=float)
    if len(load) != len(price.values) or len(load) != len(co2.values):
        raise ValidationError(
            f"span mismatch: load {len(load)} h, price {len(price.values)} h, "
            f"co2 {len(co2.values)} h"
        )
    if price.start != co2.start:
        raise ValidationError("price and co2 series do not start at the same hour")
    cost = float(np.dot(load, price.values)) / 1000.0
    emissions = float(np.dot(load, co2.values)) / 1000.0
    return EnergyAccount(load=load, cost=cost, emissions=emissions)
