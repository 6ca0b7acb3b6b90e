"""Discrete-event simulation of one brewery's production year.

Brews follow the calendar (milling through packaging); fermentation tanks
are allocated at pitch and held through in-tank conditioning.  The hourly
refrigeration control of occupied tanks runs on compiled kernels, under
either the thermostatic baseline or the price-responsive flexible policy.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import kernels, thermo
from .errors import CapacityError, ConfigurationError, DomainError
from .population import BrewerySpec, style_sequence
from .thermo import FermentationKinetics

BREW_START_HOUR = 8.0  # local-equivalent fixed offset within the brewday

POLICY_BASELINE = "baseline"
POLICY_FLEXIBLE = "flexible"


class Stage(IntEnum):
    MILLING = 0
    MASHING = 1
    LAUTERING = 2
    BOIL = 3
    WHIRLPOOL = 4
    COOL_TO_PITCH = 5
    FERMENTING = 6
    CONDITIONING = 7
    PACKAGED = 8


@dataclass(frozen=True)
class StageDurations:
    milling: float = 0.5        # hours
    mashing: float = 1.5
    lautering: float = 2.0      # around 77 C; thermal energy out of scope
    boil: float = 1.5
    whirlpool: float = 0.5
    cool_to_pitch: float = 1.0
    fermentation_days: dict = field(
        default_factory=lambda: {"ale": 7.0, "lager": 14.0}
    )
    conditioning_days: dict = field(
        default_factory=lambda: {"ale": 7.0, "lager": 21.0}
    )

    def __post_init__(self) -> None:
        for name in ("milling", "mashing", "lautering", "boil", "whirlpool",
                     "cool_to_pitch"):
            if getattr(self, name) < 0.0:
                raise ConfigurationError(f"stage duration {name} must be >= 0")
        for style in ("ale", "lager"):
            if self.fermentation_days[style] < 0 or self.conditioning_days[style] < 0:
                raise ConfigurationError("fermentation/conditioning days must be >= 0")

    @property
    def pre_ferment_hours(self) -> float:
        return (self.milling + self.mashing + self.lautering + self.boil
                + self.whirlpool + self.cool_to_pitch)

    def occupancy_days(self) -> dict[str, float]:
        """Days a batch holds its unitank (fermentation plus conditioning)."""
        return {
            style: self.fermentation_days[style] + self.conditioning_days[style]
            for style in ("ale", "lager")
        }


@dataclass
class Batch:
    id: int
    style: str
    volume: float  # hl
    kinetics: FermentationKinetics
    stage: Stage = Stage.MILLING
    stage_entry_time: float = 0.0  # hours since year start, UTC
    pitch_time: float | None = None
    tank_id: int | None = None


@dataclass(frozen=True)
class BrewEvent:
    start_hour: float  # hours since year start, UTC
    style: str


@dataclass(frozen=True)
class BrewCalendar:
    events: tuple[BrewEvent, ...]

    def __len__(self) -> int:
        return len(self.events)


def first_monday_hour(year: int) -> float:
    """Hours from Jan 1 00:00 UTC to the first Monday 00:00 of the year."""
    import datetime

    jan1 = datetime.date(year, 1, 1)
    return ((7 - jan1.weekday()) % 7) * 24.0


def build_calendar(
    spec: BrewerySpec, year: int, working_weeks: int = 48
) -> BrewCalendar:
    """Distribute the year's brews over working weeks, earliest weekdays first.

    Styles are interleaved evenly (same largest-remainder sequence the
    capacity planner assumed), so no style's fleet is oversubscribed.
    """
    total = spec.brews_per_year_ale + spec.brews_per_year_lager
    if total == 0:
        return BrewCalendar(events=())
    capacity = spec.brewdays_per_week * working_weeks
    if total > capacity:
        raise ConfigurationError(
            f"brewery {spec.id}: {total} brews exceed {capacity} available brewdays"
        )
    seq = style_sequence(spec.brews_per_year_ale, spec.brews_per_year_lager)
    origin = first_monday_hour(year)
    events = []
    for i, style in enumerate(seq):
        week, day = divmod(i, spec.brewdays_per_week)
        events.append(
            BrewEvent(
                start_hour=origin + week * 168.0 + day * 24.0 + BREW_START_HOUR,
                style=style,
            )
        )
    return BrewCalendar(events=tuple(events))


# Event kind ranks: releases first so a tank freed at time t can be reused at t.
EVENT_TANK_RELEASE = 0
EVENT_FERMENT_DONE = 1
EVENT_STAGE_COMPLETE = 2
EVENT_BREW_START = 3


class EventQueue:
    """Deterministic time-ordered queue; ties break by (kind rank, batch id)."""

    def __init__(self) -> None:
        self._heap: list[tuple[float, int, int]] = []
        self.current_time = -math.inf

    def push(self, time: float, kind: int, batch_id: int) -> None:
        heapq.heappush(self._heap, (time, kind, batch_id))

    def __len__(self) -> int:
        return len(self._heap)

    def peek_time(self) -> float:
        return self._heap[0][0] if self._heap else math.inf

    def pop(self) -> tuple[float, int, int]:
        time, kind, batch_id = heapq.heappop(self._heap)
        if time < self.current_time:
            raise DomainError("event queue time went backwards")
        self.current_time = time
        return time, kind, batch_id


@dataclass(frozen=True)
class TankOccupancy:
    batch_id: int
    style: str
    pitch_hour: float
    ferment_end_hour: float
    release_hour: float


class TankFleet:
    """Per-style groups of identical tanks with lowest-id-first allocation."""

    def __init__(self, spec: BrewerySpec) -> None:
        self.geometry_by_tank: dict[int, thermo.TankGeometry] = {}
        self.style_by_tank: dict[int, str] = {}
        self._free: dict[str, list[int]] = {}
        tank_id = 1
        for tc in spec.tank_fleet:
            ids = list(range(tank_id, tank_id + tc.count))
            tank_id += tc.count
            self._free.setdefault(tc.style, []).extend(ids)
            for tid in ids:
                self.geometry_by_tank[tid] = tc.geometry
                self.style_by_tank[tid] = tc.style
        for ids in self._free.values():
            heapq.heapify(ids)

    def acquire(self, style: str) -> int:
        free = self._free.get(style)
        if not free:
            raise CapacityError(f"no free {style} tank (planning bug)")
        return heapq.heappop(free)

    def release(self, tank_id: int) -> None:
        heapq.heappush(self._free[self.style_by_tank[tank_id]], tank_id)


def assign_tank(batch: Batch, fleet: TankFleet) -> int:
    """Allocate the lowest-numbered free tank of the batch's style."""
    if batch.stage is not Stage.COOL_TO_PITCH:
        raise DomainError(
            f"batch {batch.id} not at pitch (stage {batch.stage.name})"
        )
    return fleet.acquire(batch.style)


class BreweryProcessSimulation:
    """Runs the stage/tank event simulation; yields tank occupancy segments."""

    _PRE_STAGES = (Stage.MILLING, Stage.MASHING, Stage.LAUTERING, Stage.BOIL,
                   Stage.WHIRLPOOL, Stage.COOL_TO_PITCH)

    def __init__(self, spec: BrewerySpec, calendar: BrewCalendar,
                 durations: StageDurations,
                 kinetics_by_style: dict[str, FermentationKinetics]) -> None:
        self.spec = spec
        self.durations = durations
        self.fleet = TankFleet(spec)
        self.batches: dict[int, Batch] = {}
        self.occupancy: dict[int, list[TankOccupancy]] = {
            tid: [] for tid in self.fleet.geometry_by_tank
        }
        self.queue = EventQueue()
        self._ferment_end: dict[int, float] = {}
        for batch_id, event in enumerate(calendar.events):
            self.batches[batch_id] = Batch(
                id=batch_id,
                style=event.style,
                volume=spec.batch_volume,
                kinetics=kinetics_by_style[event.style],
                stage_entry_time=event.start_hour,
            )
            self.queue.push(event.start_hour, EVENT_BREW_START, batch_id)

    def _stage_duration(self, stage: Stage) -> float:
        d = self.durations
        return {
            Stage.MILLING: d.milling,
            Stage.MASHING: d.mashing,
            Stage.LAUTERING: d.lautering,
            Stage.BOIL: d.boil,
            Stage.WHIRLPOOL: d.whirlpool,
            Stage.COOL_TO_PITCH: d.cool_to_pitch,
        }[stage]

    def advance(self, until: float) -> list[tuple[float, int, int]]:
        """Process all events with time <= until, in deterministic order."""
        if until < self.queue.current_time:
            raise DomainError("cannot advance the event queue backwards")
        processed = []
        while len(self.queue) and self.queue.peek_time() <= until:
            time, kind, batch_id = self.queue.pop()
            self._dispatch(time, kind, batch_id)
            processed.append((time, kind, batch_id))
        return processed

    def run(self) -> None:
        self.advance(math.inf)

    def _dispatch(self, time: float, kind: int, batch_id: int) -> None:
        batch = self.batches[batch_id]
        if kind == EVENT_BREW_START:
            batch.stage = Stage.MILLING
            batch.stage_entry_time = time
            self.queue.push(
                time + self._stage_duration(Stage.MILLING),
                EVENT_STAGE_COMPLETE, batch_id,
            )
        elif kind == EVENT_STAGE_COMPLETE:
            if batch.stage is Stage.COOL_TO_PITCH:
                self._pitch(time, batch)
            else:
                next_stage = Stage(batch.stage + 1)
                batch.stage = next_stage
                batch.stage_entry_time = time
                self.queue.push(
                    time + self._stage_duration(next_stage),
                    EVENT_STAGE_COMPLETE, batch_id,
                )
        elif kind == EVENT_FERMENT_DONE:
            batch.stage = Stage.CONDITIONING
            batch.stage_entry_time = time
            self._ferment_end[batch_id] = time
            self.queue.push(
                time + self.durations.conditioning_days[batch.style] * 24.0,
                EVENT_TANK_RELEASE, batch_id,
            )
        elif kind == EVENT_TANK_RELEASE:
            batch.stage = Stage.PACKAGED
            batch.stage_entry_time = time
            self.occupancy[batch.tank_id].append(
                TankOccupancy(
                    batch_id=batch.id,
                    style=batch.style,
                    pitch_hour=batch.pitch_time,
                    ferment_end_hour=self._ferment_end[batch.id],
                    release_hour=time,
                )
            )
            self.fleet.release(batch.tank_id)
        else:
            raise DomainError(f"unknown event kind {kind}")

    def _pitch(self, time: float, batch: Batch) -> None:
        batch.tank_id = assign_tank(batch, self.fleet)
        batch.stage = Stage.FERMENTING
        batch.stage_entry_time = time
        batch.pitch_time = time
        self.queue.push(
            time + self.durations.fermentation_days[batch.style] * 24.0,
            EVENT_FERMENT_DONE, batch.id,
        )


@dataclass(frozen=True)
class ControlSettings:
    deadband_delta: float = 1.0   # K
    hysteresis: float = 0.5      # K
    cop: float = 3.0
    q_max_margin: float = 2.0    # q_max = margin x peak fermentation heat
    fermentation_setpoint: dict = field(
        default_factory=lambda: {"ale": 19.0, "lager": 11.0}
    )
    conditioning_setpoint: dict = field(
        default_factory=lambda: {"ale": 4.0, "lager": 2.0}
    )

    def __post_init__(self) -> None:
        if not 0.0 < self.hysteresis <= self.deadband_delta:
            raise ConfigurationError("require 0 < hysteresis <= deadband_delta")
        if self.cop <= 0.0:
            raise ConfigurationError("cop must be positive")
        if self.q_max_margin <= 0.0:
            raise ConfigurationError("q_max_margin must be positive")


@dataclass(frozen=True)
class ScenarioData:
    """Everything a single-brewery run needs, already validated."""

    year: int
    n_hours: int
    prices: dict               # area -> np.ndarray, DKK/MWh
    co2: np.ndarray            # g/kWh
    ambient: np.ndarray        # degrees C
    kinetics: dict             # style -> FermentationKinetics
    durations: StageDurations
    control: ControlSettings
    heat_coeff: thermo.FermentationHeatCoefficient
    wort_coeffs: thermo.WortPropertyCoefficients
    working_weeks: int = 48
    price_cap: float = 0.0     # max price over the year, gates lossy moves
    collect_traces: bool = False


@dataclass
class BreweryResult:
    brewery_id: int
    policy: str
    hourly_load: np.ndarray        # kWh per hour, year length
    peak_kw: float
    batches_total: int
    batches_completed: int         # packaged before year end
    traces: list | None = None

    @property
    def total_load_kwh(self) -> float:
        return float(np.sum(self.hourly_load))


def _batch_q_max(kinetics: FermentationKinetics, fill_volume: float,
                 settings: ControlSettings,
                 heat_coeff: thermo.FermentationHeatCoefficient,
                 wort_coeffs: thermo.WortPropertyCoefficients,
                 pitch_temp: float) -> float:
    """Plant capacity: margin x peak fermentation heat of the design batch."""
    peak_rate = thermo.extract_rate(kinetics, kinetics.midpoint_m)
    props = thermo.wort_properties(
        thermo.apparent_extract(kinetics, kinetics.midpoint_m), pitch_temp,
        wort_coeffs,
    )
    q_peak = thermo.fermentation_heat(props, fill_volume, peak_rate, heat_coeff)
    return max(settings.q_max_margin * q_peak, 1.0)


def _window_bounds(start: int, ferment_hours: int, length: int,
                   abs_offset: int) -> tuple[np.ndarray, np.ndarray]:
    """Window boundaries: midnights plus the fermentation/conditioning switch."""
    cuts = {0, length}
    if 0 < ferment_hours < length:
        cuts.add(ferment_hours)
    h = abs_offset % 24
    first_midnight = (24 - h) % 24
    for c in range(first_midnight, length, 24):
        cuts.add(c)
    cuts = sorted(cuts)
    starts = np.array(cuts[:-1], dtype=np.int64)
    ends = np.array(cuts[1:], dtype=np.int64)
    return starts, ends


def run_brewery(
    spec: BrewerySpec,
    data: ScenarioData,
    policies: tuple[str, ...] = (POLICY_BASELINE,),
) -> dict[str, BreweryResult]:
    """Simulate one brewery's year under the requested policies.

    The brew calendar, event simulation and per-batch forecasts are shared
    between the policies, so a mode-both run reuses identical logistics.
    """
    for policy in policies:
        if policy not in (POLICY_BASELINE, POLICY_FLEXIBLE):
            raise ConfigurationError(f"unknown policy {policy!r}")
    calendar = build_calendar(spec, data.year, data.working_weeks)
    sim = BreweryProcessSimulation(spec, calendar, data.durations, data.kinetics)
    sim.run()

    n = data.n_hours
    prices = data.prices[spec.area]
    settings = data.control
    results = {
        policy: BreweryResult(
            brewery_id=spec.id,
            policy=policy,
            hourly_load=np.zeros(n),
            peak_kw=0.0,
            batches_total=len(calendar),
            batches_completed=sum(
                1 for tid in sorted(sim.occupancy)
                for seg in sim.occupancy[tid] if seg.release_hour <= n
            ),
            traces=[] if data.collect_traces else None,
        )
        for policy in policies
    }

    dt = 3600.0
    for tank_id in sorted(sim.occupancy):
        geometry = sim.fleet.geometry_by_tank[tank_id]
        ua = geometry.ua
        for seg in sim.occupancy[tank_id]:
            batch = sim.batches[seg.batch_id]
            kinetics = batch.kinetics
            fill_m3 = batch.volume * 0.1  # hl -> m3
            ferment_sp = settings.fermentation_setpoint[batch.style]
            cond_sp = settings.conditioning_setpoint[batch.style]

            h0 = int(math.ceil(seg.pitch_hour - 1e-9))
            ferment_hours = int(round(seg.ferment_end_hour - seg.pitch_hour))
            total_hours = int(round(seg.release_hour - seg.pitch_hour))
            length = min(total_hours, n - h0)
            if length <= 0:
                continue

            since_pitch = np.arange(length, dtype=float)
            ext_start = thermo.apparent_extract_array(
                kinetics, np.minimum(since_pitch, float(ferment_hours))
            )
            rate_mid = thermo.extract_rate_array(kinetics, since_pitch + 0.5)
            pitch_props = thermo.wort_properties(
                kinetics.p_initial, ferment_sp, data.wort_coeffs
            )
            mass = pitch_props.density * fill_m3
            q_ferm = np.where(
                since_pitch < ferment_hours,
                mass * (-rate_mid / 100.0)
                * data.heat_coeff.heat_per_extract / 3600.0,
                0.0,
            )
            cp = (data.wort_coeffs.cp_ref
                  - data.wort_coeffs.cp_extract_slope * ext_start)
            mcp_arr = mass * cp
            sp_arr = np.where(since_pitch < ferment_hours, ferment_sp, cond_sp)
            ambient = data.ambient[h0:h0 + length]
            price_slice = prices[h0:h0 + length]
            q_max = _batch_q_max(
                kinetics, fill_m3, settings, data.heat_coeff, data.wort_coeffs,
                ferment_sp,
            )
            win_starts, win_ends = _window_bounds(h0, ferment_hours, length, h0)

            for policy in policies:
                duty = np.zeros(length)
                temps = np.zeros(length + 1)
                kernels.simulate_segment(
                    win_starts, win_ends, q_ferm, ambient, price_slice,
                    sp_arr, mcp_arr, ua, q_max,
                    settings.hysteresis, settings.deadband_delta, dt,
                    1 if policy == POLICY_FLEXIBLE else 0,
                    data.price_cap, ferment_sp, duty, temps,
                )
                load = duty * q_max / settings.cop / 1000.0
                result = results[policy]
                result.hourly_load[h0:h0 + length] += load
                if result.traces is not None:
                    for j in range(length):
                        result.traces.append(
                            (seg.batch_id, h0 + j, temps[j], ext_start[j],
                             duty[j] * q_max)
                        )

    for result in results.values():
        result.peak_kw = float(np.max(result.hourly_load)) if n else 0.0
    return results
