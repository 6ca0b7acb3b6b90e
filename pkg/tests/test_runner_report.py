import csv
import json

import numpy as np
import pytest

from brewflex import config, report, runner
from brewflex.errors import CalibrationError, ValidationError
from brewflex.market import hours_in_year, load_hourly_csv


class TestRunScenario:
    def test_counts_and_policies(self, report_small):
        assert report_small.national.count == 12
        assert set(report_small.national.cost) == {"baseline", "flexible"}
        assert sum(a.count for a in report_small.per_category.values()) == 12
        assert sum(a.count for a in report_small.per_area.values()) == 12

    def test_national_equals_sum_of_outcomes(self, report_small):
        for policy in ("baseline", "flexible"):
            cost = sum(o.accounts[policy].cost for o in report_small.outcomes)
            load = sum(o.accounts[policy].total_load
                       for o in report_small.outcomes)
            assert report_small.national.cost[policy] == pytest.approx(
                cost, rel=1e-12
            )
            assert report_small.national.load[policy] == pytest.approx(
                load, rel=1e-12
            )

    def test_hourly_area_load_consistent(self, report_small):
        for policy in ("baseline", "flexible"):
            hourly = report_small.hourly_area_load[policy]
            assert len(hourly["DK1"]) == hours_in_year(2021)
            total = float(hourly["DK1"].sum() + hourly["DK2"].sum())
            assert total == pytest.approx(
                report_small.national.load[policy], rel=1e-9
            )

    def test_parallel_matches_sequential(self, dataset_small):
        seq = runner.run_scenario(
            config.Scenario(seed=3, mode="baseline", files=dataset_small)
        )
        par = runner.run_scenario(
            config.Scenario(seed=3, mode="baseline", files=dataset_small,
                            workers=2)
        )
        assert par.national.cost == seq.national.cost
        for a, b in zip(seq.outcomes, par.outcomes):
            np.testing.assert_array_equal(
                a.results["baseline"].hourly_load,
                b.results["baseline"].hourly_load,
            )

    def test_price_adder_changes_bill_not_dispatch(self, dataset_small):
        base = runner.run_scenario(
            config.Scenario(seed=3, mode="both", files=dataset_small)
        )
        shifted = runner.run_scenario(
            config.Scenario(seed=3, mode="both", files=dataset_small,
                            price_adder=0.25)
        )
        for a, b in zip(base.outcomes, shifted.outcomes):
            np.testing.assert_array_equal(
                a.results["flexible"].hourly_load,
                b.results["flexible"].hourly_load,
            )
        extra = shifted.national.cost["baseline"] - base.national.cost["baseline"]
        assert extra == pytest.approx(
            0.25 * base.national.load["baseline"], rel=1e-9
        )

    def test_missing_input_file(self, dataset_small, tmp_path):
        files = dict(dataset_small)
        files["co2"] = tmp_path / "absent.csv"
        scen = config.Scenario(seed=3, files=files)
        with pytest.raises(ValidationError, match="co2"):
            runner.run_scenario(scen)

    def test_plausibility_breach_raises_with_report(self, dataset_small):
        tight = config.PlausibilityBounds(intensity_min=50.0,
                                          intensity_max=60.0)
        scen = config.Scenario(seed=3, mode="baseline", files=dataset_small,
                               plausibility=tight)
        with pytest.raises(CalibrationError) as exc:
            runner.run_scenario(scen)
        assert exc.value.report
        assert "kWh/hl" in exc.value.report[0]

    def test_facility_limit(self, scenario_239):
        specs = runner.build_population(scenario_239, limit=7)
        assert len(specs) == 7


@pytest.fixture(scope="module")
def out_dir(report_small, tmp_path_factory):
    out = tmp_path_factory.mktemp("reports")
    report.emit_reports(report_small, out)
    return out


class TestReports:
    def test_all_files_written(self, out_dir):
        for name in report.FILES:
            assert (out_dir / name).exists()

    def test_summary_schema(self, out_dir, report_small):
        doc = json.loads((out_dir / "summary.json").read_text())
        assert doc["seed"] == 3
        assert doc["facilities"] == 12
        assert set(doc["totals"]) == {"baseline", "flexible"}
        assert doc["relative_saving"] == pytest.approx(
            report_small.national.relative_saving()
        )
        assert "version" in doc["metadata"]
        assert "config_hash" in doc["metadata"]

    def test_per_category_reparses(self, out_dir, report_small):
        with (out_dir / "per_category.csv").open(newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0].keys() == {
            "category", "count", "cost_dkk", "co2_kg", "load_kwh",
            "relative_saving",
        }
        assert sum(int(r["count"]) for r in rows) == 12
        total = sum(float(r["cost_dkk"]) for r in rows)
        assert total == pytest.approx(report_small.national.cost["baseline"],
                                      rel=1e-9)

    def test_per_brewery_totals_match_summary(self, out_dir):
        totals = report.recompute_totals_from_per_brewery(
            out_dir / "per_brewery.csv"
        )
        doc = json.loads((out_dir / "summary.json").read_text())
        base = doc["totals"]["baseline"]
        assert totals["cost_dkk"] == pytest.approx(base["cost_dkk"], rel=1e-9)
        assert totals["co2_kg"] == pytest.approx(base["co2_kg"], rel=1e-9)
        assert totals["load_kwh"] == pytest.approx(base["load_kwh"], rel=1e-9)

    def test_hourly_load_reparses_and_sums(self, out_dir, report_small):
        with (out_dir / "hourly_load.csv").open(newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0].keys() == {"timestamp", "dk1_kwh", "dk2_kwh"}
        assert len(rows) == hours_in_year(2021)
        assert rows[0]["timestamp"] == "2021-01-01T00:00:00Z"
        total = sum(float(r["dk1_kwh"]) + float(r["dk2_kwh"]) for r in rows)
        assert total == pytest.approx(
            report_small.national.load["baseline"], rel=1e-9
        )

    def test_hourly_load_timestamps_iso_zulu(self, out_dir):
        with (out_dir / "hourly_load.csv").open(newline="") as fh:
            next(fh)
            first = next(fh).split(",")[0]
        assert first.endswith("Z") and "T" in first

    def test_unwritable_directory_raises(self, report_small, tmp_path):
        target = tmp_path / "file_in_the_way"
        target.write_text("x")
        with pytest.raises(OSError):
            report.emit_reports(report_small, target)
