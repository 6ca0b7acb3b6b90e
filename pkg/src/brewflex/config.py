"""Scenario configuration: a flat YAML file mirroring the module parameters.

Every modelling default (kinetics, stage durations, control band, tank
insulation, wort property coefficients, category table) is overridable here
so calibration choices stay visible and versionable.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigurationError
from .population import SizeCategory
from .process_engine import ControlSettings, StageDurations
from .thermo import (
    DEFAULT_HEAT_PER_EXTRACT,
    FermentationHeatCoefficient,
    FermentationKinetics,
    WortPropertyCoefficients,
)

MODES = ("baseline", "flexible", "both")

# Scenario-level tank insulation default.  Perfectly insulated tanks keep the
# flexible policy's energy accounting exactly equal to the thermostat's per
# window, which the zero-spread and never-worse acceptance checks rely on;
# a nonzero U-value remains fully supported.
DEFAULT_SCENARIO_U_VALUE = 0.0

DEFAULT_KINETICS = {
    "ale": dict(p_initial=12.0, p_end=2.5, rate_b=0.05, midpoint_m=60.0, shape_s=1.0),
    "lager": dict(p_initial=12.0, p_end=2.2, rate_b=0.025, midpoint_m=120.0, shape_s=1.0),
}


@dataclass(frozen=True)
class PlausibilityBounds:
    """Sanity band on simulated small-brewery cooling intensity (kWh/hl)."""

    enabled: bool = True
    small_categories: tuple[int, ...] = (1, 2)
    intensity_min: float = 1.0
    intensity_max: float = 106.0


@dataclass(frozen=True)
class Scenario:
    year: int = 2021
    seed: int = 0
    mode: str = "both"
    output_dir: Path | None = None
    workers: int = 1
    collect_traces: bool = False
    files: dict = field(default_factory=dict)  # gis, price_dk1, price_dk2, co2, ambient
    working_weeks: int = 48
    headspace: float = 0.9
    area_split_lon: float = 11.0
    categories: tuple[SizeCategory, ...] | None = None
    u_value: float = DEFAULT_SCENARIO_U_VALUE
    heat_coeff: FermentationHeatCoefficient = field(
        default_factory=FermentationHeatCoefficient
    )
    wort_coeffs: WortPropertyCoefficients = field(
        default_factory=WortPropertyCoefficients
    )
    kinetics: dict = field(
        default_factory=lambda: {
            style: FermentationKinetics(**params)
            for style, params in DEFAULT_KINETICS.items()
        }
    )
    durations: StageDurations = field(default_factory=StageDurations)
    control: ControlSettings = field(default_factory=ControlSettings)
    price_adder: float = 0.0  # DKK/kWh added to spot prices (sensitivity knob)
    plausibility: PlausibilityBounds = field(default_factory=PlausibilityBounds)
    config_hash: str | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        required = {"gis", "price_dk1", "price_dk2", "co2", "ambient"}
        missing = required - set(self.files)
        if missing:
            raise ConfigurationError(f"missing file bindings: {sorted(missing)}")

    @property
    def policies(self) -> tuple[str, ...]:
        if self.mode == "both":
            return ("baseline", "flexible")
        return (self.mode,)


def _style_map(raw, caster, what: str) -> dict:
    if set(raw) != {"ale", "lager"}:
        raise ConfigurationError(f"{what} must have exactly 'ale' and 'lager' keys")
    return {style: caster(raw[style]) for style in ("ale", "lager")}


def _build_categories(raw) -> tuple[SizeCategory, ...]:
    cats = []
    for row in raw:
        try:
            cats.append(SizeCategory(**row))
        except TypeError as exc:
            raise ConfigurationError(f"bad category row {row!r}: {exc}") from None
    return tuple(cats)


def scenario_from_dict(doc: dict, base_dir: Path | None = None,
                       config_hash: str | None = None) -> Scenario:
    """Build a validated :class:`Scenario` from a parsed YAML document."""
    doc = dict(doc or {})
    base = base_dir or Path(".")
    known = {
        "year", "seed", "mode", "output_dir", "workers", "traces", "files",
        "population", "thermo", "kinetics", "stages", "control", "cost",
        "plausibility",
    }
    unknown = set(doc) - known
    if unknown:
        raise ConfigurationError(f"unknown scenario keys: {sorted(unknown)}")

    files_raw = doc.get("files", {})
    files = {key: (base / str(value)) for key, value in files_raw.items()}

    pop = dict(doc.get("population", {}))
    categories = None
    if "categories" in pop:
        categories = _build_categories(pop.pop("categories"))

    th = dict(doc.get("thermo", {}))
    wort_coeffs = WortPropertyCoefficients(**th.get("wort_coefficients", {}))
    heat_coeff = FermentationHeatCoefficient(
        heat_per_extract=float(th.get("heat_per_extract", DEFAULT_HEAT_PER_EXTRACT))
    )

    kin_raw = doc.get("kinetics", DEFAULT_KINETICS)
    kinetics = _style_map(
        kin_raw, lambda params: FermentationKinetics(**params), "kinetics"
    )

    stages_raw = dict(doc.get("stages", {}))
    control_raw = dict(doc.get("control", {}))
    cost_raw = dict(doc.get("cost", {}))
    plaus_raw = dict(doc.get("plausibility", {}))
    if "small_categories" in plaus_raw:
        plaus_raw["small_categories"] = tuple(plaus_raw["small_categories"])

    out = doc.get("output_dir")
    try:
        return Scenario(
            year=int(doc.get("year", 2021)),
            seed=int(doc.get("seed", 0)),
            mode=str(doc.get("mode", "both")),
            output_dir=(base / str(out)) if out is not None else None,
            workers=int(doc.get("workers", 1)),
            collect_traces=bool(doc.get("traces", False)),
            files=files,
            working_weeks=int(pop.get("working_weeks", 48)),
            headspace=float(pop.get("headspace", 0.9)),
            area_split_lon=float(pop.get("area_split_lon", 11.0)),
            categories=categories,
            u_value=float(th.get("u_value", DEFAULT_SCENARIO_U_VALUE)),
            heat_coeff=heat_coeff,
            wort_coeffs=wort_coeffs,
            kinetics=kinetics,
            durations=StageDurations(**stages_raw),
            control=ControlSettings(**control_raw),
            price_adder=float(cost_raw.get("price_adder", 0.0)),
            plausibility=PlausibilityBounds(**plaus_raw),
            config_hash=config_hash,
        )
    except TypeError as exc:
        raise ConfigurationError(f"bad scenario configuration: {exc}") from None


def load_scenario(path: str | Path) -> Scenario:
    """Load a scenario YAML file; relative file paths resolve next to it."""
    path = Path(path)
    raw = path.read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        doc = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"{path}: invalid YAML: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path}: scenario file must be a mapping")
    return scenario_from_dict(doc, base_dir=path.parent, config_hash=digest)
