"""Report emission: summary JSON, per-category/per-brewery tables, load profile.

All file contents are rendered in memory first, so a failure never leaves a
partial report directory behind.
"""
from __future__ import annotations

import io
import csv
import json
from datetime import timedelta
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from .errors import ValidationError
from .market import year_start
from .runner import NationalReport

FILES = ("summary.json", "per_category.csv", "per_brewery.csv", "hourly_load.csv")


def _pkg_version() -> str:
    try:
        return version("brewflex")
    except PackageNotFoundError:
        return "unknown"


def _saving_or_zero(value) -> float:
    return 0.0 if value is None else float(value)


def render_summary(report: NationalReport) -> str:
    scenario = report.scenario
    national = report.national
    doc = {
        "year": scenario.year,
        "mode": scenario.mode,
        "seed": scenario.seed,
        "facilities": national.count,
        "totals": {
            policy: {
                "cost_dkk": national.cost[policy],
                "co2_kg": national.emissions[policy],
                "load_kwh": national.load[policy],
            }
            for policy in sorted(national.cost)
        },
        "relative_saving": _saving_or_zero(national.relative_saving()),
        "per_area": {
            area: {
                "facilities": agg.count,
                "cost_dkk": {p: agg.cost[p] for p in sorted(agg.cost)},
                "relative_saving": _saving_or_zero(agg.relative_saving()),
            }
            for area, agg in report.per_area.items()
        },
        "metadata": {
            "version": _pkg_version(),
            "config_hash": scenario.config_hash,
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_per_category(report: NationalReport) -> str:
    policy = report.primary_policy
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["category", "count", "cost_dkk", "co2_kg", "load_kwh", "relative_saving"]
    )
    for category, agg in report.per_category.items():
        writer.writerow([
            category,
            agg.count,
            repr(agg.cost[policy]),
            repr(agg.emissions[policy]),
            repr(agg.load[policy]),
            repr(_saving_or_zero(agg.relative_saving())),
        ])
    return buf.getvalue()


def render_per_brewery(report: NationalReport) -> str:
    policy = report.primary_policy
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([
        "id", "name", "category", "area", "annual_volume_hl",
        "cost_dkk", "co2_kg", "load_kwh", "peak_kw", "relative_saving",
    ])
    for outcome in report.outcomes:
        spec = outcome.spec
        acct = outcome.accounts[policy]
        writer.writerow([
            spec.id, spec.name, spec.category, spec.area,
            repr(spec.annual_volume),
            repr(acct.cost), repr(acct.emissions), repr(acct.total_load),
            repr(outcome.results[policy].peak_kw),
            repr(_saving_or_zero(outcome.relative_saving())),
        ])
    return buf.getvalue()


def render_hourly_load(report: NationalReport) -> str:
    policy = report.primary_policy
    start = year_start(report.scenario.year)
    dk1 = report.hourly_area_load[policy]["DK1"]
    dk2 = report.hourly_area_load[policy]["DK2"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["timestamp", "dk1_kwh", "dk2_kwh"])
    for i in range(len(dk1)):
        ts = (start + timedelta(hours=i)).strftime("%Y-%m-%dT%H:%M:%SZ")
        writer.writerow([ts, repr(float(dk1[i])), repr(float(dk2[i]))])
    return buf.getvalue()


def emit_reports(report: NationalReport, out_dir: str | Path) -> dict[str, Path]:
    """Write all report files; nothing is written if rendering or I/O setup fails."""
    out_dir = Path(out_dir)
    contents = {
        "summary.json": render_summary(report),
        "per_category.csv": render_per_category(report),
        "per_brewery.csv": render_per_brewery(report),
        "hourly_load.csv": render_hourly_load(report),
    }
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out_dir} is not writable: {exc}") from None
    written = {}
    for name, text in contents.items():
        path = out_dir / name
        path.write_text(text, encoding="utf-8")
        written[name] = path
    return written


def recompute_totals_from_per_brewery(path: str | Path) -> dict[str, float]:
    """Independent re-summation of the emitted per-brewery table."""
    totals = {"cost_dkk": 0.0, "co2_kg": 0.0, "load_kwh": 0.0}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "cost_dkk" not in reader.fieldnames:
            raise ValidationError(f"{path}: not a per-brewery table")
        for row in reader:
            for key in totals:
                totals[key] += float(row[key])
    return totals
