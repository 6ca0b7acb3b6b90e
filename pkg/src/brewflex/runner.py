"""National scenario orchestration and aggregation."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import market, population, process_engine
from .config import Scenario
from .errors import CalibrationError, ValidationError
from .flexibility import savings
from .market import EnergyAccount, HourlySeries, account, hours_in_year
from .population import BrewerySpec
from .process_engine import BreweryResult, ScenarioData, run_brewery


@dataclass
class BreweryOutcome:
    spec: BrewerySpec
    accounts: dict            # policy -> EnergyAccount
    results: dict             # policy -> BreweryResult

    def relative_saving(self) -> float | None:
        if "baseline" not in self.accounts or "flexible" not in self.accounts:
            return None
        base = self.accounts["baseline"].cost
        if base == 0.0:
            return 0.0
        return savings(base, self.accounts["flexible"].cost)


@dataclass
class Aggregate:
    count: int = 0
    cost: dict = field(default_factory=dict)       # policy -> DKK
    emissions: dict = field(default_factory=dict)  # policy -> kg
    load: dict = field(default_factory=dict)       # policy -> kWh

    def add(self, outcome: BreweryOutcome) -> None:
        self.count += 1
        for policy, acct in outcome.accounts.items():
            self.cost[policy] = self.cost.get(policy, 0.0) + acct.cost
            self.emissions[policy] = self.emissions.get(policy, 0.0) + acct.emissions
            self.load[policy] = self.load.get(policy, 0.0) + acct.total_load

    def relative_saving(self) -> float | None:
        if "baseline" not in self.cost or "flexible" not in self.cost:
            return None
        if self.cost["baseline"] == 0.0:
            return 0.0
        return savings(self.cost["baseline"], self.cost["flexible"])


@dataclass
class NationalReport:
    scenario: Scenario
    outcomes: list            # per brewery, ascending id
    per_category: dict        # category index -> Aggregate
    per_area: dict            # DK1/DK2 -> Aggregate
    national: Aggregate
    hourly_area_load: dict    # policy -> {area -> np.ndarray}

    @property
    def primary_policy(self) -> str:
        return "baseline" if "baseline" in self.national.cost else "flexible"


def _load_series(scenario: Scenario) -> tuple[dict, HourlySeries, HourlySeries]:
    for key, path in scenario.files.items():
        if not path.exists():
            raise ValidationError(f"scenario file binding {key!r} not found: {path}")
    prices = {
        "DK1": market.load_hourly_csv(scenario.files["price_dk1"], "price", "DK1"),
        "DK2": market.load_hourly_csv(scenario.files["price_dk2"], "price", "DK2"),
    }
    co2 = market.load_hourly_csv(scenario.files["co2"], "co2", "national")
    ambient = market.load_hourly_csv(scenario.files["ambient"], "ambient", "national")
    for series in (*prices.values(), co2, ambient):
        market.validate_year(series, scenario.year)
    if scenario.price_adder:
        # constant DKK/kWh adder = 1000 x DKK/MWh; a uniform shift, so it
        # never changes the dispatch, only the bill
        prices = {
            area: HourlySeries(
                area=area, kind="price", start=s.start,
                values=s.values + scenario.price_adder * 1000.0,
            )
            for area, s in prices.items()
        }
    return prices, co2, ambient


def build_population(scenario: Scenario,
                     limit: int | None = None) -> list[BrewerySpec]:
    gis = population.load_gis(scenario.files["gis"])
    if limit is not None:
        if limit <= 0:
            raise ValidationError(f"facility limit must be positive: {limit}")
        gis = gis[:limit]
    return population.synthesize_population(
        gis,
        categories=scenario.categories,
        seed=scenario.seed,
        occupancy_days=scenario.durations.occupancy_days(),
        working_weeks=scenario.working_weeks,
        headspace=scenario.headspace,
        u_value=scenario.u_value,
        area_split_lon=scenario.area_split_lon,
    )


def _scenario_data(scenario: Scenario, prices: dict, co2, ambient,
                   collect_traces: bool) -> ScenarioData:
    price_arrays = {area: s.values for area, s in prices.items()}
    price_cap = max(float(np.max(s.values)) for s in prices.values())
    return ScenarioData(
        year=scenario.year,
        n_hours=hours_in_year(scenario.year),
        prices=price_arrays,
        co2=co2.values,
        ambient=ambient.values,
        kinetics=scenario.kinetics,
        durations=scenario.durations,
        control=scenario.control,
        heat_coeff=scenario.heat_coeff,
        wort_coeffs=scenario.wort_coeffs,
        working_weeks=scenario.working_weeks,
        price_cap=price_cap,
        collect_traces=collect_traces,
    )


def _run_one(args) -> dict:
    spec, data, policies = args
    return run_brewery(spec, data, policies)


def check_plausibility(scenario: Scenario, outcomes: list) -> None:
    """Fail the run when small-brewery cooling intensity leaves its band."""
    bounds = scenario.plausibility
    if not bounds.enabled:
        return
    policy = "baseline" if "baseline" in scenario.policies else scenario.policies[0]
    breaches = []
    for outcome in outcomes:
        spec = outcome.spec
        if spec.category not in bounds.small_categories:
            continue
        intensity = outcome.accounts[policy].total_load / spec.annual_volume
        if not bounds.intensity_min <= intensity <= bounds.intensity_max:
            breaches.append(
                f"brewery {spec.id} ({spec.name}, category {spec.category}): "
                f"{intensity:.3f} kWh/hl outside "
                f"[{bounds.intensity_min}, {bounds.intensity_max}]"
            )
    if breaches:
        raise CalibrationError(
            f"{len(breaches)} small breweries breach the cooling-intensity "
            f"plausibility band; first: {breaches[0]}",
            report=breaches,
        )


def run_scenario(scenario: Scenario,
                 specs: list[BrewerySpec] | None = None) -> NationalReport:
    """Synthesize the population, run every brewery, aggregate deterministically.

    In mode ``both`` the same population, calendars and tank allocations are
    reused for the baseline and flexible policies.
    """
    prices, co2, ambient = _load_series(scenario)
    if specs is None:
        specs = build_population(scenario)
    data = _scenario_data(scenario, prices, co2, ambient, scenario.collect_traces)
    policies = scenario.policies

    if scenario.workers > 1:
        with ProcessPoolExecutor(max_workers=scenario.workers) as pool:
            all_results = list(
                pool.map(_run_one, ((spec, data, policies) for spec in specs),
                         chunksize=8)
            )
    else:
        all_results = [run_brewery(spec, data, policies) for spec in specs]

    outcomes = []
    per_category: dict[int, Aggregate] = {}
    per_area: dict[str, Aggregate] = {}
    national = Aggregate()
    n = data.n_hours
    hourly = {
        policy: {"DK1": np.zeros(n), "DK2": np.zeros(n)} for policy in policies
    }
    for spec, results in zip(specs, all_results):
        accounts = {
            policy: account(results[policy].hourly_load, prices[spec.area], co2)
            for policy in policies
        }
        outcome = BreweryOutcome(spec=spec, accounts=accounts, results=results)
        outcomes.append(outcome)
        per_category.setdefault(spec.category, Aggregate()).add(outcome)
        per_area.setdefault(spec.area, Aggregate()).add(outcome)
        national.add(outcome)
        for policy in policies:
            hourly[policy][spec.area] += results[policy].hourly_load

    report = NationalReport(
        scenario=scenario,
        outcomes=outcomes,
        per_category=dict(sorted(per_category.items())),
        per_area=dict(sorted(per_area.items())),
        national=national,
        hourly_area_load=hourly,
    )
    check_plausibility(scenario, outcomes)
    return report
