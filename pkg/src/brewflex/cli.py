"""Command-line entry point for national scenario runs.

Exit codes: 0 success, 2 validation or configuration error, 3 infeasible
dispatch plan, 4 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import MODES, load_scenario
from .errors import BrewflexError, InfeasibleError
from .report import emit_reports
from .runner import build_population, run_scenario

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="brewflex",
        description=(
            "Simulate a national brewery population's refrigeration load for "
            "one year and report the cost and CO2 effect of price-responsive "
            "cooling."
        ),
    )
    parser.add_argument("--scenario", required=True, metavar="FILE",
                        help="scenario YAML file")
    parser.add_argument("--mode", choices=MODES,
                        help="override the scenario's control mode")
    parser.add_argument("--seed", type=int, help="override the scenario's seed")
    parser.add_argument("--out", metavar="DIR",
                        help="override the scenario's output directory")
    parser.add_argument("--traces", action="store_true",
                        help="collect per-batch temperature and duty traces")
    parser.add_argument("--facilities", type=int, metavar="N",
                        help="simulate only the first N facilities (desk-scale run)")
    return parser


def _apply_overrides(scenario, args):
    updates = {}
    if args.mode is not None:
        updates["mode"] = args.mode
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.out is not None:
        updates["output_dir"] = Path(args.out)
    if args.traces:
        updates["collect_traces"] = True
    return replace(scenario, **updates) if updates else scenario


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario_path = Path(args.scenario)
        if not scenario_path.exists():
            print(f"error: scenario file not found: {scenario_path}",
                  file=sys.stderr)
            return EXIT_IO
        scenario = _apply_overrides(load_scenario(scenario_path), args)
        if scenario.output_dir is None:
            print("error: no output directory (set output_dir or pass --out)",
                  file=sys.stderr)
            return EXIT_VALIDATION
        for key, path in sorted(scenario.files.items()):
            if not path.exists():
                print(f"error: input file {key!r} not found: {path}",
                      file=sys.stderr)
                return EXIT_IO
        specs = build_population(scenario, limit=args.facilities)
        report = run_scenario(scenario, specs=specs)
        written = emit_reports(report, scenario.output_dir)
    except InfeasibleError as exc:
        print(f"error: infeasible dispatch plan: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BrewflexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    national = report.national
    print(f"facilities simulated: {national.count}")
    for policy in report.scenario.policies:
        print(
            f"{policy}: cost {national.cost[policy] / 1e6:.2f} MDKK, "
            f"co2 {national.emissions[policy] / 1e3:.1f} t, "
            f"load {national.load[policy] / 1e3:.1f} MWh"
        )
    saving = national.relative_saving()
    if saving is not None and "flexible" in national.cost and "baseline" in national.cost:
        print(f"relative cost saving: {saving * 100.0:.2f} %")
    for name in sorted(written):
        print(f"wrote {written[name]}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
