"""Refrigeration control policies for fermentation tanks.

Two policies exist: a hysteresis thermostat (the baseline) and a
price-responsive planner that defers or advances cooling within a
temperature deadband.  A brute-force enumerator over a small duty grid
serves as the planner's validation oracle.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InfeasibleError

_EPS = 1e-12


@dataclass(frozen=True)
class CoolingPlant:
    q_max: float  # W thermal removal capacity per tank
    cop: float    # coefficient of performance

    def __post_init__(self) -> None:
        if self.q_max <= 0.0:
            raise DomainError(f"q_max must be positive: {self.q_max}")
        if self.cop <= 0.0:
            raise DomainError(f"cop must be positive: {self.cop}")

    def electric_kwh(self, duty: float, hours: float = 1.0) -> float:
        return duty * self.q_max / self.cop / 1000.0 * hours


@dataclass(frozen=True)
class FlexBand:
    setpoint: float        # degrees C
    deadband_delta: float  # K, symmetric around the setpoint
    hysteresis: float      # K, baseline relay half-width

    def __post_init__(self) -> None:
        if not 0.0 < self.hysteresis <= self.deadband_delta:
            raise DomainError(
                f"require 0 < hysteresis <= deadband_delta, got "
                f"{self.hysteresis}, {self.deadband_delta}"
            )

    @property
    def upper(self) -> float:
        return self.setpoint + self.deadband_delta

    @property
    def lower(self) -> float:
        return self.setpoint - self.deadband_delta


@dataclass(frozen=True)
class DispatchPlan:
    duty: np.ndarray = field(repr=False)          # fraction in [0,1] per hour
    temperatures: np.ndarray = field(repr=False)  # degrees C at hour boundaries, len H+1
    electric_load: np.ndarray = field(repr=False)  # kWh per hour
    cost: float                                    # DKK
    window_start: object = None                    # optional UTC timestamp


def thermostat_step(temperature: float, band: FlexBand, was_cooling: bool) -> int:
    """Hysteresis relay: 1 = cool at full duty, 0 = off."""
    if temperature > band.setpoint + band.hysteresis:
        return 1
    if temperature < band.setpoint - band.hysteresis:
        return 0
    return 1 if was_cooling else 0


def step_temperature(
    temperature: float,
    q_net: float,
    ambient: float,
    mcp: float,
    ua: float,
    dt: float,
) -> float:
    """One exact exponential step of the tank thermal balance.

    Same closed form as ``thermo.tank_step``; shared by the planner, the
    oracle and the simulation kernels so plans match realizations exactly.
    """
    if mcp <= 0.0:
        raise DomainError(f"mcp must be positive: {mcp}")
    if ua == 0.0:
        return temperature + q_net * dt / mcp
    t_eq = ambient + q_net / ua
    return t_eq + (temperature - t_eq) * math.exp(-ua / mcp * dt)


def simulate_dispatch(
    duty,
    t0: float,
    q_ferm,
    ambient,
    mcp: float,
    ua: float,
    q_max: float,
    dt: float = 3600.0,
):
    """Hour-boundary temperatures produced by a duty vector."""
    duty = np.asarray(duty, dtype=float)
    q_ferm = np.asarray(q_ferm, dtype=float)
    ambient = np.asarray(ambient, dtype=float)
    temps = np.empty(len(duty) + 1)
    temps[0] = t0
    for k in range(len(duty)):
        temps[k + 1] = step_temperature(
            temps[k], q_ferm[k] - duty[k] * q_max, ambient[k], mcp, ua, dt
        )
    return temps


def _bounds(band: FlexBand, horizon: int):
    """Per-boundary temperature bounds for boundaries 1..H.

    Interior boundaries must stay within the deadband; the terminal boundary
    must come back to the setpoint so no thermal debt is carried forward.
    """
    upper = np.full(horizon, band.upper)
    upper[-1] = band.setpoint
    lower = np.full(horizon, band.lower)
    return upper, lower


def _effective_bounds(band, t0, q_ferm, ambient, mcp, ua, dt):
    """Band bounds relaxed by the zero-duty trajectory.

    The plant can only cool; where ambient losses passively drag the tank
    below the band, the passive trajectory itself becomes the lower bound
    (active cooling below the band stays forbidden).
    """
    horizon = len(np.asarray(q_ferm))
    upper, lower = _bounds(band, horizon)
    passive = simulate_dispatch(
        np.zeros(horizon), t0, q_ferm, ambient, mcp, ua, 0.0, dt
    )
    return upper, np.minimum(lower, passive[1:])


def plan_window(
    t0: float,
    mcp: float,
    ua: float,
    ambient,
    q_ferm,
    prices,
    band: FlexBand,
    plant: CoolingPlant,
    dt: float = 3600.0,
    window_start=None,
) -> DispatchPlan:
    """Cheapest-hour backfill dispatch over the window.

    Starts from zero duty and, while some hour-boundary temperature exceeds
    its upper bound, adds the minimal duty at the cheapest not-yet-exhausted
    hour at or before the violation (ties to the earlier hour), capped by
    full duty and by the lower temperature bound.
    """
    q_ferm = np.asarray(q_ferm, dtype=float)
    ambient = np.asarray(ambient, dtype=float)
    prices = np.asarray(prices, dtype=float)
    horizon = len(prices)
    if horizon < 1:
        raise DomainError("horizon must be at least 1 hour")
    if len(q_ferm) != horizon or len(ambient) != horizon:
        raise DomainError("q_ferm/ambient forecasts must cover the horizon")
    if not band.lower - 1e-9 <= t0 <= band.upper + 1e-9:
        raise DomainError(f"start temperature {t0} outside band")

    # linear-response coefficients of the exact exponential step
    if ua == 0.0:
        decay = 1.0
        phi = -plant.q_max * dt / mcp
    else:
        decay = math.exp(-ua / mcp * dt)
        phi = -(plant.q_max / ua) * (1.0 - decay)

    upper, lower = _effective_bounds(band, t0, q_ferm, ambient, mcp, ua, dt)
    duty = np.zeros(horizon)
    temps = simulate_dispatch(duty, t0, q_ferm, ambient, mcp, ua, plant.q_max, dt)

    def first_violation() -> int | None:
        for k in range(horizon):
            if temps[k + 1] > upper[k] + _EPS:
                return k
        return None

    # backfill passes alternate with exact re-simulation: the incremental
    # linear-response updates are exact in real arithmetic but accumulate
    # float noise, so residual violations are re-fixed on the exact stepper
    for _pass in range(8):
        guard = 0
        k = first_violation()
        while k is not None:
            guard += 1
            if guard > 4 * horizon * horizon + 16:
                raise InfeasibleError(
                    "planner failed to converge", first_violation_hour=k
                )
            blocked: set[int] = set()
            while True:
                candidates = [
                    j for j in range(k + 1)
                    if j not in blocked and duty[j] < 1.0 - _EPS
                ]
                if not candidates:
                    raise InfeasibleError(
                        f"temperature band infeasible; first violated hour {k}",
                        first_violation_hour=k,
                    )
                j = min(candidates, key=lambda j: (prices[j], j))
                # effect of one unit of duty at hour j on boundary i+1
                w_k = -phi * decay ** (k - j)
                needed = (temps[k + 1] - upper[k]) / w_k
                cap = 1.0 - duty[j]
                for i in range(j, horizon):
                    w_i = -phi * decay ** (i - j)
                    slack = temps[i + 1] - lower[i]
                    cap = min(cap, slack / w_i if slack > 0.0 else 0.0)
                add = min(needed, cap)
                if add <= _EPS:
                    blocked.add(j)
                    continue
                duty[j] += add
                for i in range(j, horizon):
                    temps[i + 1] -= add * (-phi) * decay ** (i - j)
                if add >= needed - _EPS:
                    break
            k = first_violation()
        temps = simulate_dispatch(duty, t0, q_ferm, ambient, mcp, ua,
                                  plant.q_max, dt)
        if first_violation() is None:
            break

    # negative prices pay for extra cooling; top up the cheapest hours first,
    # capped by full duty and the lower band (extra duty can only cool, so
    # the upper bounds stay satisfied)
    for j in sorted(
        (j for j in range(horizon) if prices[j] < 0.0),
        key=lambda j: (prices[j], j),
    ):
        cap = 1.0 - duty[j]
        for i in range(j, horizon):
            w_i = -phi * decay ** (i - j)
            slack = temps[i + 1] - lower[i]
            cap = min(cap, slack / w_i if slack > 0.0 else 0.0)
        if cap > _EPS:
            duty[j] += cap
            for i in range(j, horizon):
                temps[i + 1] -= cap * (-phi) * decay ** (i - j)

    # re-simulate so reported temperatures are the exact stepper output
    temps = simulate_dispatch(duty, t0, q_ferm, ambient, mcp, ua, plant.q_max, dt)
    load = duty * plant.q_max / plant.cop / 1000.0 * (dt / 3600.0)
    cost = float(np.dot(load, prices)) / 1000.0
    return DispatchPlan(
        duty=duty, temperatures=temps, electric_load=load, cost=cost,
        window_start=window_start,
    )


def dispatch_feasible(
    duty,
    t0: float,
    q_ferm,
    ambient,
    mcp: float,
    ua: float,
    band: FlexBand,
    plant: CoolingPlant,
    dt: float = 3600.0,
    tol: float = 1e-6,
) -> bool:
    """Band-plus-terminal feasibility of a duty vector.

    The lower bound is relaxed to the passive (zero-duty) trajectory, since
    a cooling-only plant cannot hold the band against ambient losses.
    """
    temps = simulate_dispatch(duty, t0, q_ferm, ambient, mcp, ua, plant.q_max, dt)
    upper, lower = _effective_bounds(band, t0, q_ferm, ambient, mcp, ua, dt)
    return bool(
        np.all(temps[1:] <= upper + tol) and np.all(temps[1:] >= lower - tol)
    )


def oracle_enumerate(
    t0: float,
    mcp: float,
    ua: float,
    ambient,
    q_ferm,
    prices,
    band: FlexBand,
    plant: CoolingPlant,
    dt: float = 3600.0,
    duty_levels=(0.0, 0.5, 1.0),
):
    """Exhaustive minimum-cost search over a small duty grid.

    Returns ``(duty_vector, cost)`` for the cheapest feasible vector (ties
    broken lexicographically) or ``None`` when no vector is feasible.
    Intended as an independent test oracle; horizon must be at most 8.
    """
    prices = np.asarray(prices, dtype=float)
    horizon = len(prices)
    if horizon > 8:
        raise DomainError("oracle horizon limited to 8 hours")
    best = None
    best_cost = math.inf
    for combo in itertools.product(duty_levels, repeat=horizon):
        if not dispatch_feasible(combo, t0, q_ferm, ambient, mcp, ua, band, plant, dt):
            continue
        load = np.array(combo) * plant.q_max / plant.cop / 1000.0 * (dt / 3600.0)
        cost = float(np.dot(load, prices)) / 1000.0
        if cost < best_cost - _EPS:
            best = combo
            best_cost = cost
    if best is None:
        return None
    return np.array(best), best_cost


def savings(baseline_cost: float, flexible_cost: float) -> float:
    """Relative saving fraction of the flexible run versus the baseline."""
    if baseline_cost == 0.0:
        raise DomainError("relative saving undefined for zero baseline cost")
    return (baseline_cost - flexible_cost) / baseline_cost
