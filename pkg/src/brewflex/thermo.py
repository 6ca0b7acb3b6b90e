"""Fermentation kinetics, wort properties, tank geometry and thermal integration.

Apparent extract follows a four-parameter logistic decline from the initial
to the final gravity.  Heat release is proportional to the extract
consumption rate.  The tank integrator uses the closed-form solution of the
first-order thermal balance, so results are independent of step size for
piecewise-constant inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError

# Exothermic heat of fermentation per kilogram of consumed extract.
# 140 kcal/kg is the classic brewing-engineering figure.
DEFAULT_HEAT_PER_EXTRACT = 587_000.0  # J/kg

DEFAULT_U_VALUE = 0.3  # W/(m2 K), insulated stainless tank


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class FermentationKinetics:
    """Logistic extract-decline parameters for one beer style."""

    p_initial: float  # degrees Plato at pitch
    p_end: float      # terminal degrees Plato
    rate_b: float     # 1/hour
    midpoint_m: float  # hours since pitch
    shape_s: float    # dimensionless asymmetry

    def __post_init__(self) -> None:
        for name in ("p_initial", "p_end", "rate_b", "midpoint_m", "shape_s"):
            _require_finite(name, getattr(self, name))
        if not (self.p_initial >= self.p_end >= 0.0):
            raise DomainError(
                f"require p_initial >= p_end >= 0, got {self.p_initial}, {self.p_end}"
            )
        if self.rate_b <= 0.0:
            raise DomainError(f"rate_b must be > 0, got {self.rate_b}")
        if self.shape_s <= 0.0:
            raise DomainError(f"shape_s must be > 0, got {self.shape_s}")
        if self.midpoint_m < 0.0:
            raise DomainError(f"midpoint_m must be >= 0, got {self.midpoint_m}")


@dataclass(frozen=True)
class WortProperties:
    density: float        # kg/m3
    specific_heat: float  # J/(kg K)

    def __post_init__(self) -> None:
        if not 900.0 <= self.density <= 1200.0:
            raise DomainError(f"density out of range [900, 1200]: {self.density}")
        if not 3000.0 <= self.specific_heat <= 4300.0:
            raise DomainError(
                f"specific_heat out of range [3000, 4300]: {self.specific_heat}"
            )


@dataclass(frozen=True)
class WortPropertyCoefficients:
    """Coefficients of the linear density/heat-capacity relations.

    density = (density_ref - temp_slope * (T - ref_temp)) * (1 + extract_coeff * P)
    specific_heat = cp_ref - cp_extract_slope * P
    """

    density_ref: float = 1000.0
    density_temp_slope: float = 0.2
    density_ref_temp: float = 4.0
    density_extract_coeff: float = 0.00404
    cp_ref: float = 4186.0
    cp_extract_slope: float = 23.0


@dataclass(frozen=True)
class FermentationHeatCoefficient:
    heat_per_extract: float = DEFAULT_HEAT_PER_EXTRACT  # J per kg fermented extract

    def __post_init__(self) -> None:
        if not (self.heat_per_extract > 0.0) or not math.isfinite(self.heat_per_extract):
            raise DomainError(
                f"heat_per_extract must be positive and finite: {self.heat_per_extract}"
            )


@dataclass(frozen=True)
class TankGeometry:
    """Vertical cylinder with flat end caps, height = 2 x diameter."""

    volume: float        # m3
    diameter: float      # m
    height: float        # m
    surface_area: float  # m2, shell plus both end caps
    u_value: float       # W/(m2 K)

    def __post_init__(self) -> None:
        if self.volume <= 0.0:
            raise DomainError(f"tank volume must be positive: {self.volume}")
        if self.u_value < 0.0:
            raise DomainError(f"u_value must be >= 0: {self.u_value}")
        if not math.isclose(self.height, 2.0 * self.diameter, rel_tol=1e-9):
            raise DomainError("tank height must equal 2 x diameter")
        if not math.isclose(
            self.volume, math.pi / 4.0 * self.diameter**2 * self.height, rel_tol=1e-9
        ):
            raise DomainError("tank volume inconsistent with diameter/height")
        expected_area = (
            math.pi * self.diameter * self.height + math.pi / 2.0 * self.diameter**2
        )
        if not math.isclose(self.surface_area, expected_area, rel_tol=1e-9):
            raise DomainError("tank surface area inconsistent with dimensions")

    @property
    def ua(self) -> float:
        """Overall heat-transfer conductance in W/K."""
        return self.u_value * self.surface_area


@dataclass(frozen=True)
class TankThermalState:
    temperature: float       # degrees C
    extract: float           # degrees Plato
    fill_volume: float       # m3
    time_since_pitch: float  # hours


def _softplus(z: float) -> float:
    # log(1 + exp(z)) without overflow
    if z > 40.0:
        return z
    return math.log1p(math.exp(z))


def apparent_extract(k: FermentationKinetics, t: float) -> float:
    """Apparent extract in degrees Plato at ``t`` hours after pitch.

    P(t) = p_end + (p_initial - p_end) / (1 + exp(rate_b * (t - midpoint_m)))**(1/shape_s)

    Monotonically non-increasing, bounded in [p_end, p_initial].
    """
    if t < 0.0:
        raise DomainError(f"t must be >= 0, got {t}")
    z = k.rate_b * (t - k.midpoint_m)
    return k.p_end + (k.p_initial - k.p_end) * math.exp(-_softplus(z) / k.shape_s)


def apparent_extract_array(k: FermentationKinetics, t: np.ndarray) -> np.ndarray:
    """Vectorized :func:`apparent_extract` over an array of times."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("t must be >= 0")
    z = k.rate_b * (t - k.midpoint_m)
    softplus = np.where(z > 40.0, z, np.log1p(np.exp(np.minimum(z, 40.0))))
    return k.p_end + (k.p_initial - k.p_end) * np.exp(-softplus / k.shape_s)


def extract_rate(k: FermentationKinetics, t: float) -> float:
    """Analytic d/dt of :func:`apparent_extract`, in degrees Plato per hour (<= 0)."""
    if t < 0.0:
        raise DomainError(f"t must be >= 0, got {t}")
    amplitude = k.p_initial - k.p_end
    if amplitude == 0.0:
        return 0.0
    z = k.rate_b * (t - k.midpoint_m)
    # -(A*B/s) * E * (1+E)**(-(1 + 1/s)) evaluated in log space
    log_term = z - (1.0 + 1.0 / k.shape_s) * _softplus(z)
    return -(amplitude * k.rate_b / k.shape_s) * math.exp(log_term)


def extract_rate_array(k: FermentationKinetics, t: np.ndarray) -> np.ndarray:
    """Vectorized :func:`extract_rate`."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("t must be >= 0")
    amplitude = k.p_initial - k.p_end
    if amplitude == 0.0:
        return np.zeros_like(t)
    z = k.rate_b * (t - k.midpoint_m)
    softplus = np.where(z > 40.0, z, np.log1p(np.exp(np.minimum(z, 40.0))))
    log_term = z - (1.0 + 1.0 / k.shape_s) * softplus
    return -(amplitude * k.rate_b / k.shape_s) * np.exp(log_term)


def wort_properties(
    extract: float,
    temperature: float,
    coeffs: WortPropertyCoefficients | None = None,
) -> WortProperties:
    """Density and specific heat of wort at the given extract and temperature."""
    if not 0.0 <= extract <= 30.0:
        raise DomainError(f"extract out of range [0, 30]: {extract}")
    if not -5.0 <= temperature <= 105.0:
        raise DomainError(f"temperature out of range [-5, 105]: {temperature}")
    c = coeffs or WortPropertyCoefficients()
    density = (
        c.density_ref - c.density_temp_slope * (temperature - c.density_ref_temp)
    ) * (1.0 + c.density_extract_coeff * extract)
    specific_heat = c.cp_ref - c.cp_extract_slope * extract
    return WortProperties(density=density, specific_heat=specific_heat)


def fermentation_heat(
    props: WortProperties,
    fill_volume: float,
    rate: float,
    e_f: FermentationHeatCoefficient,
) -> float:
    """Instantaneous fermentation heat release in watts.

    ``rate`` is the (non-positive) extract rate in degrees Plato per hour;
    Plato is a mass percentage, hence the /100.
    """
    if fill_volume < 0.0:
        raise DomainError(f"fill_volume must be >= 0: {fill_volume}")
    if rate > 0.0:
        raise DomainError(f"extract rate must be <= 0 during fermentation: {rate}")
    return props.density * fill_volume * (-rate / 100.0) * e_f.heat_per_extract / 3600.0


def tank_dimensions(volume: float, u_value: float = DEFAULT_U_VALUE) -> TankGeometry:
    """Dimension a 2:1 (height:diameter) cylindrical tank for a given volume."""
    if volume <= 0.0:
        raise DomainError(f"tank volume must be positive: {volume}")
    diameter = (2.0 * volume / math.pi) ** (1.0 / 3.0)
    height = 2.0 * diameter
    surface_area = math.pi * diameter * height + math.pi / 2.0 * diameter**2
    return TankGeometry(
        volume=volume,
        diameter=diameter,
        height=height,
        surface_area=surface_area,
        u_value=u_value,
    )


def tank_step(
    state: TankThermalState,
    geometry: TankGeometry,
    q_ferm: float,
    q_cool: float,
    ambient: float,
    dt: float,
    props: WortProperties,
    kinetics: FermentationKinetics | None = None,
) -> TankThermalState:
    """Advance the tank thermal state by ``dt`` seconds.

    Integrates dT/dt = (q_ferm - q_cool + UA*(ambient - T)) / (m cp) exactly
    for piecewise-constant inputs.  When ``kinetics`` is given the extract is
    advanced via :func:`apparent_extract`.
    """
    if dt <= 0.0:
        raise DomainError(f"dt must be positive: {dt}")
    if q_cool < 0.0:
        raise DomainError(f"q_cool must be >= 0: {q_cool}")
    mass = props.density * state.fill_volume
    mcp = mass * props.specific_heat
    q_net = q_ferm - q_cool
    if mcp == 0.0:
        if q_net != 0.0:
            raise DomainError("nonzero heat flow into a zero-mass tank")
        temperature = state.temperature
    else:
        ua = geometry.ua
        b = ua / mcp
        if b == 0.0:
            temperature = state.temperature + q_net * dt / mcp
        else:
            t_eq = ambient + q_net / ua
            temperature = t_eq + (state.temperature - t_eq) * math.exp(-b * dt)
    time_since_pitch = state.time_since_pitch + dt / 3600.0
    extract = state.extract
    if kinetics is not None:
        extract = apparent_extract(kinetics, time_since_pitch)
    return replace(
        state,
        temperature=temperature,
        extract=extract,
        time_since_pitch=time_since_pitch,
    )
