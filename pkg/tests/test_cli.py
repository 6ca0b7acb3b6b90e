import json

import pytest

from brewflex import cli
from brewflex.errors import InfeasibleError


@pytest.fixture(scope="module")
def scenario_file(dataset_small, tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    path = root / "scenario.yaml"
    lines = ["year: 2021", "seed: 3", "mode: both", "files:"]
    lines += [f"  {key}: {value}" for key, value in dataset_small.items()]
    path.write_text("\n".join(lines) + "\n")
    return path


class TestMain:
    def test_successful_run(self, scenario_file, tmp_path, capsys):
        out = tmp_path / "out"
        code = cli.main([
            "--scenario", str(scenario_file), "--out", str(out),
            "--facilities", "6",
        ])
        assert code == 0
        captured = capsys.readouterr().out
        assert "facilities simulated: 6" in captured
        assert "relative cost saving" in captured
        doc = json.loads((out / "summary.json").read_text())
        assert doc["facilities"] == 6
        for name in ("per_category.csv", "per_brewery.csv", "hourly_load.csv"):
            assert (out / name).exists()

    def test_mode_and_seed_overrides(self, scenario_file, tmp_path):
        out = tmp_path / "out"
        code = cli.main([
            "--scenario", str(scenario_file), "--out", str(out),
            "--facilities", "4", "--mode", "baseline", "--seed", "11",
        ])
        assert code == 0
        doc = json.loads((out / "summary.json").read_text())
        assert doc["mode"] == "baseline"
        assert doc["seed"] == 11
        assert set(doc["totals"]) == {"baseline"}

    def test_missing_scenario_is_io_error(self, tmp_path, capsys):
        code = cli.main(["--scenario", str(tmp_path / "nope.yaml")])
        assert code == cli.EXIT_IO
        assert "not found" in capsys.readouterr().err

    def test_missing_input_file_is_io_error(self, dataset_small, tmp_path,
                                            capsys):
        path = tmp_path / "scenario.yaml"
        lines = ["files:"]
        files = dict(dataset_small)
        files["gis"] = tmp_path / "missing_gis.csv"
        lines += [f"  {key}: {value}" for key, value in files.items()]
        path.write_text("\n".join(lines) + "\n")
        code = cli.main(["--scenario", str(path), "--out", str(tmp_path / "o")])
        assert code == cli.EXIT_IO
        assert "gis" in capsys.readouterr().err

    def test_bad_config_is_validation_error(self, tmp_path, capsys):
        path = tmp_path / "scenario.yaml"
        path.write_text("mode: turbo\n")
        code = cli.main(["--scenario", str(path), "--out", str(tmp_path / "o")])
        assert code == cli.EXIT_VALIDATION
        assert "error" in capsys.readouterr().err

    def test_missing_output_dir_is_validation_error(self, scenario_file,
                                                    capsys):
        code = cli.main(["--scenario", str(scenario_file)])
        assert code == cli.EXIT_VALIDATION
        assert "output" in capsys.readouterr().err

    def test_infeasible_plan_maps_to_exit_3(self, scenario_file, tmp_path,
                                            monkeypatch):
        def boom(*args, **kwargs):
            raise InfeasibleError("band too tight", first_violation_hour=17)

        monkeypatch.setattr(cli, "run_scenario", boom)
        code = cli.main([
            "--scenario", str(scenario_file), "--out", str(tmp_path / "o"),
        ])
        assert code == cli.EXIT_INFEASIBLE

    def test_traces_flag_accepted(self, scenario_file, tmp_path):
        code = cli.main([
            "--scenario", str(scenario_file), "--out", str(tmp_path / "o"),
            "--facilities", "2", "--traces",
        ])
        assert code == 0

    def test_scenario_flag_required(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main([])
        assert exc.value.code == 2
