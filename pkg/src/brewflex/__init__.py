"""Sector-scale simulation of brewery refrigeration demand response.

Synthesizes a national population of breweries, simulates each facility's
brewing process and fermentation-tank cooling over a calendar year against
hourly electricity prices, and quantifies the cost and CO2 effect of
price-responsive cooling relative to plain thermostatic control.
"""

from .config import Scenario, load_scenario, scenario_from_dict
from .errors import (
    BrewflexError,
    CalibrationError,
    CapacityError,
    ConfigurationError,
    DomainError,
    InfeasibleError,
    ParseError,
    ValidationError,
)
from .flexibility import CoolingPlant, DispatchPlan, FlexBand, plan_window, savings
from .market import EnergyAccount, HourlySeries, account, load_hourly_csv
from .population import (
    BrewerySpec,
    GisRecord,
    SizeCategory,
    default_categories,
    load_gis,
    plan_capacity,
    serialize_population,
    synthesize_population,
)
from .process_engine import BreweryResult, run_brewery
from .report import emit_reports
from .runner import NationalReport, build_population, run_scenario
from .thermo import (
    FermentationKinetics,
    TankGeometry,
    apparent_extract,
    extract_rate,
    fermentation_heat,
    tank_dimensions,
    tank_step,
    wort_properties,
)

__version__ = "0.1.0"

__all__ = [
    "BrewflexError",
    "BreweryResult",
    "BrewerySpec",
    "CalibrationError",
    "CapacityError",
    "ConfigurationError",
    "CoolingPlant",
    "DispatchPlan",
    "DomainError",
    "EnergyAccount",
    "FermentationKinetics",
    "FlexBand",
    "GisRecord",
    "HourlySeries",
    "InfeasibleError",
    "NationalReport",
    "ParseError",
    "Scenario",
    "SizeCategory",
    "TankGeometry",
    "ValidationError",
    "account",
    "apparent_extract",
    "build_population",
    "default_categories",
    "emit_reports",
    "extract_rate",
    "fermentation_heat",
    "load_gis",
    "load_hourly_csv",
    "load_scenario",
    "plan_capacity",
    "plan_window",
    "run_brewery",
    "run_scenario",
    "savings",
    "scenario_from_dict",
    "serialize_population",
    "synthesize_population",
    "tank_dimensions",
    "tank_step",
    "wort_properties",
]
