"""Synthesis of the national brewery population.

Facilities come from a GIS CSV; size categories, ale:lager shares and
brewdays follow the national category statistics.  Category assignment
shuffles the exact count multiset so per-category counts always hold;
annual volumes are drawn from a triangular distribution with a per-facility
RNG substream, making the population deterministic for a given seed.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, ParseError, ValidationError
from .thermo import TankGeometry, tank_dimensions, DEFAULT_U_VALUE

STYLES = ("ale", "lager")

# Danish geographic bounding box accepted for facility coordinates.
LON_RANGE = (7.0, 16.0)
LAT_RANGE = (54.0, 58.0)

DEFAULT_AREA_SPLIT_LON = 11.0  # degrees east; Great Belt
DEFAULT_WORKING_WEEKS = 48
DEFAULT_HEADSPACE = 0.9
DEFAULT_CATEGORY1_MIN_HL = 50.0
DEFAULT_CATEGORY8_MAX_HL = 4_000_000.0
DEFAULT_CATEGORY8_MODE_HL = 2_500_000.0


@dataclass(frozen=True)
class SizeCategory:
    index: int              # 1..8
    volume_min: float       # hl/year, inclusive
    volume_max: float       # hl/year, exclusive
    count: int              # facilities nationally
    ale_share: float        # fraction of annual volume brewed as ale
    brewdays_per_week: int
    mode: float | None = None  # triangular mode; defaults to the interval midpoint

    def __post_init__(self) -> None:
        if not 0.0 <= self.ale_share <= 1.0:
            raise ConfigurationError(f"ale_share out of [0,1]: {self.ale_share}")
        if not self.volume_min < self.volume_max:
            raise ConfigurationError(
                f"category {self.index}: volume_min must be < volume_max"
            )
        if self.count < 0:
            raise ConfigurationError(f"category {self.index}: negative count")
        if not 1 <= self.brewdays_per_week <= 7:
            raise ConfigurationError(
                f"category {self.index}: brewdays_per_week out of [1,7]"
            )

    @property
    def triangular_mode(self) -> float:
        if self.mode is not None:
            return self.mode
        return 0.5 * (self.volume_min + self.volume_max)


def default_categories() -> tuple[SizeCategory, ...]:
    """The eight national size categories (counts sum to 239)."""
    rows = [
        # index, vmin, vmax, count, ale_share, brewdays, mode
        (1, DEFAULT_CATEGORY1_MIN_HL, 680.0, 181, 0.8, 3, None),
        (2, 680.0, 5_100.0, 40, 0.8, 3, None),
        (3, 5_100.0, 10_000.0, 6, 0.7, 5, None),
        (4, 10_000.0, 17_500.0, 4, 0.7, 5, None),
        (5, 17_500.0, 36_000.0, 3, 0.7, 5, None),
        (6, 36_000.0, 70_000.0, 1, 0.6, 7, None),
        (7, 70_000.0, 1_350_000.0, 3, 0.6, 7, None),
        (8, 1_350_000.0, DEFAULT_CATEGORY8_MAX_HL, 1, 0.5, 7, DEFAULT_CATEGORY8_MODE_HL),
    ]
    return tuple(
        SizeCategory(
            index=i, volume_min=lo, volume_max=hi, count=n,
            ale_share=share, brewdays_per_week=days, mode=mode,
        )
        for i, lo, hi, n, share, days, mode in rows
    )


@dataclass(frozen=True)
class GisRecord:
    name: str
    longitude: float  # degrees east
    latitude: float   # degrees north

    def __post_init__(self) -> None:
        if not LON_RANGE[0] <= self.longitude <= LON_RANGE[1]:
            raise ValidationError(
                f"{self.name!r}: longitude {self.longitude} outside Danish "
                f"bounding box {LON_RANGE}"
            )
        if not LAT_RANGE[0] <= self.latitude <= LAT_RANGE[1]:
            raise ValidationError(
                f"{self.name!r}: latitude {self.latitude} outside Danish "
                f"bounding box {LAT_RANGE}"
            )


@dataclass(frozen=True)
class TankClass:
    """A group of identical fermentation tanks dedicated to one style."""

    style: str
    geometry: TankGeometry
    count: int


@dataclass(frozen=True)
class BrewerySpec:
    id: int
    name: str
    category: int
    annual_volume: float  # hl
    area: str             # DK1 | DK2
    longitude: float
    latitude: float
    brewdays_per_week: int
    batch_volume: float   # hl
    brews_per_year_ale: int
    brews_per_year_lager: int
    tank_fleet: tuple[TankClass, ...]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "category": self.category,
            "annual_volume": self.annual_volume,
            "area": self.area,
            "longitude": self.longitude,
            "latitude": self.latitude,
            "brewdays_per_week": self.brewdays_per_week,
            "batch_volume": self.batch_volume,
            "brews_per_year_ale": self.brews_per_year_ale,
            "brews_per_year_lager": self.brews_per_year_lager,
            "tank_fleet": [
                {
                    "style": tc.style,
                    "volume_m3": tc.geometry.volume,
                    "u_value": tc.geometry.u_value,
                    "count": tc.count,
                }
                for tc in self.tank_fleet
            ],
        }


def serialize_population(population: Sequence[BrewerySpec]) -> str:
    """Canonical JSON serialization; byte-identical for identical populations."""
    return json.dumps([spec.to_dict() for spec in population], sort_keys=True)


def load_gis(path: str | Path) -> list[GisRecord]:
    """Load ``name,longitude,latitude`` facility records, in file order."""
    path = Path(path)
    records: list[GisRecord] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if [h.strip() for h in header] != ["name", "longitude", "latitude"]:
            raise ParseError(
                f"{path}: expected header 'name,longitude,latitude', got {header}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            name = row[0].strip()
            if not name:
                raise ParseError(f"{path}:{lineno}: empty facility name")
            try:
                lon = float(row[1])
                lat = float(row[2])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad coordinate: {exc}") from None
            try:
                records.append(GisRecord(name=name, longitude=lon, latitude=lat))
            except ValidationError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return records


def assign_area(longitude: float, split: float = DEFAULT_AREA_SPLIT_LON) -> str:
    """DK1 west of the split longitude, DK2 at or east of it."""
    if not math.isfinite(longitude):
        raise DomainError(f"longitude must be finite: {longitude}")
    return "DK1" if longitude < split else "DK2"


def sample_triangular(vmin: float, vmode: float, vmax: float, u: float) -> float:
    """Inverse-CDF draw from a triangular distribution given a uniform ``u``."""
    if not (vmin <= vmode <= vmax):
        raise DomainError(f"require min <= mode <= max, got {vmin}, {vmode}, {vmax}")
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"u must be in [0, 1]: {u}")
    if vmin == vmax:
        return vmin
    fc = (vmode - vmin) / (vmax - vmin)
    if u < fc:
        return vmin + math.sqrt(u * (vmax - vmin) * (vmode - vmin))
    return vmax - math.sqrt((1.0 - u) * (vmax - vmin) * (vmax - vmode))


def rescale_counts(categories: Sequence[SizeCategory], n: int) -> list[SizeCategory]:
    """Rescale category counts proportionally to ``n`` (largest remainder)."""
    if n <= 0:
        raise ConfigurationError(f"population size must be positive: {n}")
    total = sum(c.count for c in categories)
    if total <= 0:
        raise ConfigurationError("category counts sum to zero")
    if total == n:
        return list(categories)
    quotas = [c.count * n / total for c in categories]
    floors = [int(math.floor(q)) for q in quotas]
    remainder = n - sum(floors)
    # distribute leftover seats to the largest fractional parts; ties by index
    order = sorted(
        range(len(categories)), key=lambda i: (-(quotas[i] - floors[i]), i)
    )
    for i in order[:remainder]:
        floors[i] += 1
    out = []
    for cat, count in zip(categories, floors):
        out.append(
            SizeCategory(
                index=cat.index, volume_min=cat.volume_min, volume_max=cat.volume_max,
                count=count, ale_share=cat.ale_share,
                brewdays_per_week=cat.brewdays_per_week, mode=cat.mode,
            )
        )
    return out


def style_sequence(brews_ale: int, brews_lager: int) -> list[str]:
    """Evenly interleaved ale/lager brew order (largest-remainder spacing).

    Shared by capacity planning and the brew calendar so both see the same
    weekly style mix.
    """
    total = brews_ale + brews_lager
    if total == 0:
        return []
    seq = []
    ale_done = 0
    for i in range(total):
        target = int(math.floor(brews_ale * (i + 1) / total + 1e-12))
        if target > ale_done:
            seq.append("ale")
            ale_done += 1
        else:
            seq.append("lager")
    assert ale_done == brews_ale
    return seq


def _max_simultaneous(total_brews: int, brewdays: int, seq: Sequence[str],
                      style: str, occupancy_hours: float) -> int:
    """Calendar oracle: peak tank occupancy for one style over a brew year.

    Brew i happens in week i // brewdays on weekday i % brewdays; tanks are
    held for ``occupancy_hours`` from that point.
    """
    events = []  # (hour, delta)
    for i, s in enumerate(seq):
        if s != style:
            continue
        start = (i // brewdays) * 168.0 + (i % brewdays) * 24.0
        events.append((start, 1))
        events.append((start + occupancy_hours, -1))
    events.sort(key=lambda e: (e[0], e[1]))  # releases before acquisitions at ties
    peak = 0
    level = 0
    for _, delta in events:
        level += delta
        peak = max(peak, level)
    return peak


@dataclass(frozen=True)
class CapacityPlan:
    batch_volume: float  # hl
    brews_per_year_ale: int
    brews_per_year_lager: int
    tank_fleet: tuple[TankClass, ...]


def plan_capacity(
    annual_volume: float,
    category: SizeCategory,
    occupancy_days: dict[str, float],
    working_weeks: int = DEFAULT_WORKING_WEEKS,
    headspace: float = DEFAULT_HEADSPACE,
    u_value: float = DEFAULT_U_VALUE,
) -> CapacityPlan:
    """Derive batch plan and tank fleet from the annual volume.

    ``occupancy_days`` maps style -> days a batch holds its tank (fermentation
    plus any in-tank conditioning).  Tank counts are the larger of the
    steady-state formula ceil(brews_per_week * occupancy/7) and the peak
    simultaneous occupancy observed on the actual weekly brew pattern.
    """
    if annual_volume <= 0.0:
        raise ConfigurationError(f"annual volume must be positive: {annual_volume}")
    if working_weeks <= 0:
        raise ConfigurationError(f"working weeks must be positive: {working_weeks}")
    if not 0.0 < headspace <= 1.0:
        raise ConfigurationError(f"headspace fraction out of (0,1]: {headspace}")
    total_brews = category.brewdays_per_week * working_weeks
    batch_volume = annual_volume / total_brews
    brews_ale = int(math.floor(total_brews * category.ale_share + 0.5))
    brews_lager = total_brews - brews_ale
    seq = style_sequence(brews_ale, brews_lager)
    tank_volume_m3 = batch_volume * 0.1 / headspace  # 1 hl = 0.1 m3
    fleet = []
    for style, brews in (("ale", brews_ale), ("lager", brews_lager)):
        if brews == 0:
            continue
        occ_days = occupancy_days[style]
        per_week = brews / working_weeks
        formula = math.ceil(per_week * occ_days / 7.0 - 1e-9)
        observed = _max_simultaneous(
            total_brews, category.brewdays_per_week, seq, style, occ_days * 24.0
        )
        count = max(formula, observed)
        fleet.append(
            TankClass(style=style, geometry=tank_dimensions(tank_volume_m3, u_value),
                      count=count)
        )
    return CapacityPlan(
        batch_volume=batch_volume,
        brews_per_year_ale=brews_ale,
        brews_per_year_lager=brews_lager,
        tank_fleet=tuple(fleet),
    )


def synthesize_population(
    gis: Sequence[GisRecord],
    categories: Sequence[SizeCategory] | None = None,
    seed: int = 0,
    *,
    occupancy_days: dict[str, float] | None = None,
    working_weeks: int = DEFAULT_WORKING_WEEKS,
    headspace: float = DEFAULT_HEADSPACE,
    u_value: float = DEFAULT_U_VALUE,
    area_split_lon: float = DEFAULT_AREA_SPLIT_LON,
) -> list[BrewerySpec]:
    """Build the deterministic national population for one seed."""
    if not gis:
        raise ConfigurationError("GIS record list is empty")
    categories = list(categories) if categories is not None else list(default_categories())
    counts_total = sum(c.count for c in categories)
    if counts_total != len(gis):
        categories = rescale_counts(categories, len(gis))
    by_index = {c.index: c for c in categories}
    if occupancy_days is None:
        occupancy_days = {"ale": 14.0, "lager": 35.0}

    multiset = []
    for cat in categories:
        multiset.extend([cat.index] * cat.count)
    assign_rng = np.random.default_rng(np.random.SeedSequence((seed, 0)))
    assignment = assign_rng.permutation(np.array(multiset, dtype=np.int64))

    population: list[BrewerySpec] = []
    for i, record in enumerate(gis):
        cat = by_index[int(assignment[i])]
        rng = np.random.default_rng(np.random.SeedSequence((seed, 1, i)))
        u = float(rng.random())
        volume = sample_triangular(
            cat.volume_min, cat.triangular_mode, cat.volume_max, u
        )
        # keep strictly inside the half-open category interval
        volume = min(volume, np.nextafter(cat.volume_max, -np.inf))
        plan = plan_capacity(
            volume, cat, occupancy_days,
            working_weeks=working_weeks, headspace=headspace, u_value=u_value,
        )
        population.append(
            BrewerySpec(
                id=i,
                name=record.name,
                category=cat.index,
                annual_volume=volume,
                area=assign_area(record.longitude, area_split_lon),
                longitude=record.longitude,
                latitude=record.latitude,
                brewdays_per_week=cat.brewdays_per_week,
                batch_volume=plan.batch_volume,
                brews_per_year_ale=plan.brews_per_year_ale,
                brews_per_year_lager=plan.brews_per_year_lager,
                tank_fleet=plan.tank_fleet,
            )
        )
    return population
