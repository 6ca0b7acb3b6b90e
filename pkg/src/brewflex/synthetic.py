"""Deterministic synthetic year data: prices, CO2 intensity, weather, GIS.

The price series has a configurable daily peak/off-peak spread plus a mild
seasonal drift and seeded noise, which is enough structure to exercise the
flexible dispatch without any external data.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .market import HourlySeries, hours_in_year, save_hourly_csv, year_start


def _hour_of_day(year: int) -> np.ndarray:
    return np.arange(hours_in_year(year)) % 24


def _day_of_year(year: int) -> np.ndarray:
    return np.arange(hours_in_year(year)) // 24


def synthetic_price(
    year: int,
    area: str,
    base: float = 400.0,
    daily_spread: float = 0.5,
    seed: int = 0,
) -> HourlySeries:
    """Hourly spot price in DKK/MWh with the given peak/off-peak spread.

    ``daily_spread`` is (peak - offpeak) / offpeak of the deterministic daily
    shape; 0.5 means evening peaks 50 % above the nightly trough.
    """
    n = hours_in_year(year)
    hod = _hour_of_day(year)
    doy = _day_of_year(year)
    # daily shape in [-1, 1], peaking at 18:00 UTC
    daily = np.cos(2.0 * np.pi * (hod - 18) / 24.0)
    amp = daily_spread / (2.0 + daily_spread)  # so (1+amp)/(1-amp) = 1 + spread
    seasonal = 1.0 + 0.15 * np.cos(2.0 * np.pi * (doy - 15) / 365.0)
    values = base * seasonal * (1.0 + amp * daily)
    if area == "DK2":
        values = values * 1.06
    area_key = {"DK1": 1, "DK2": 2, "national": 3}[area]
    rng = np.random.default_rng(np.random.SeedSequence((seed, area_key, 7)))
    values = values + rng.normal(0.0, 0.01 * base, size=n)
    return HourlySeries(area=area, kind="price", start=year_start(year), values=values)


def constant_price(year: int, area: str, value: float = 400.0) -> HourlySeries:
    n = hours_in_year(year)
    return HourlySeries(
        area=area, kind="price", start=year_start(year), values=np.full(n, value)
    )


def synthetic_co2(year: int, base: float = 160.0, seed: int = 0) -> HourlySeries:
    """Hourly grid CO2 intensity in g/kWh (national signal)."""
    n = hours_in_year(year)
    hod = _hour_of_day(year)
    doy = _day_of_year(year)
    daily = np.cos(2.0 * np.pi * (hod - 19) / 24.0)
    seasonal = 1.0 + 0.25 * np.cos(2.0 * np.pi * (doy - 20) / 365.0)
    values = base * seasonal * (1.0 + 0.35 * daily)
    rng = np.random.default_rng(np.random.SeedSequence((seed, 11)))
    values = np.maximum(values + rng.normal(0.0, 4.0, size=n), 0.0)
    return HourlySeries(
        area="national", kind="co2", start=year_start(year), values=values
    )


def synthetic_ambient(year: int, seed: int = 0) -> HourlySeries:
    """Hourly outdoor temperature in degrees C, Danish-like climate."""
    n = hours_in_year(year)
    hod = _hour_of_day(year)
    doy = _day_of_year(year)
    seasonal = 8.5 + 7.5 * np.cos(2.0 * np.pi * (doy - 200) / 365.0)
    diurnal = 3.0 * np.cos(2.0 * np.pi * (hod - 15) / 24.0)
    rng = np.random.default_rng(np.random.SeedSequence((seed, 13)))
    values = seasonal + diurnal + rng.normal(0.0, 1.0, size=n)
    return HourlySeries(
        area="national", kind="ambient", start=year_start(year),
        values=np.clip(values, -39.0, 49.0),
    )


def synthetic_gis(n_facilities: int = 239, seed: int = 0) -> list[tuple[str, float, float]]:
    """Plausible facility coordinates inside the Danish bounding box."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, 17)))
    rows = []
    for i in range(n_facilities):
        # roughly 60/40 west/east of the Great Belt
        if rng.random() < 0.6:
            lon = float(rng.uniform(8.1, 10.9))   # Jutland / Funen
            lat = float(rng.uniform(54.9, 57.5))
        else:
            lon = float(rng.uniform(11.1, 12.6))  # Zealand
            lat = float(rng.uniform(54.7, 56.0))
        rows.append((f"Brewery {i + 1:03d}", round(lon, 5), round(lat, 5)))
    return rows


def write_gis_csv(path: str | Path, rows) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write("name,longitude,latitude\n")
        for name, lon, lat in rows:
            fh.write(f"{name},{lon},{lat}\n")


def write_dataset(
    out_dir: str | Path,
    year: int = 2021,
    n_facilities: int = 239,
    seed: int = 0,
    daily_spread: float = 0.5,
) -> dict[str, Path]:
    """Write the full synthetic input bundle; returns the file map."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {
        "gis": out_dir / "gis.csv",
        "price_dk1": out_dir / "price_dk1.csv",
        "price_dk2": out_dir / "price_dk2.csv",
        "co2": out_dir / "co2.csv",
        "ambient": out_dir / "ambient.csv",
    }
    write_gis_csv(files["gis"], synthetic_gis(n_facilities, seed))
    save_hourly_csv(
        synthetic_price(year, "DK1", daily_spread=daily_spread, seed=seed),
        files["price_dk1"],
    )
    save_hourly_csv(
        synthetic_price(year, "DK2", daily_spread=daily_spread, seed=seed),
        files["price_dk2"],
    )
    save_hourly_csv(synthetic_co2(year, seed=seed), files["co2"])
    save_hourly_csv(synthetic_ambient(year, seed=seed), files["ambient"])
    return files
