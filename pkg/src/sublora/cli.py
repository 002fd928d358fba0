"""Command-line entry point.

Exit codes: 0 success, 2 config error, 3 calibration infeasible,
4 partial run (rejected sweep points present). Worker count comes from the
SUBLORA_WORKERS environment variable only.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import ExperimentConfig
from .errors import CalibrationInfeasibleError, ConfigError, DomainError, ScenarioError
from . import experiments
from .phy import TOA_SOURCES
from .network import INTERFERENCE_MODES


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="flat key-value config file")
    parser.add_argument("--seed", type=int, help="master RNG seed (u64)")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    parser.add_argument("--out", help="output CSV path (default: out/<command>.csv)")
    parser.add_argument("--energy-profile", help="packaged profile name or file path")
    parser.add_argument("--toa-source", choices=TOA_SOURCES)
    parser.add_argument("--interference", choices=INTERFERENCE_MODES)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sublora",
        description="Underground LoRaWAN uplink simulator and WET split optimizer",
    )
    parser.add_argument("--version", action="version", version=f"sublora {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("run", "simulate one scenario and dump the full result"),
        ("fig3", "success probability and EPP vs SF across soil conditions"),
        ("fig4", "lifetime vs WET duration per SF"),
        ("fig5", "lifetime vs device count with per-point (SF, T_w) optimization"),
        ("optimize", "optimal WET duration per SF and the winning pair"),
        ("calibrate", "fit per-period overhead against the lifetime anchor"),
        ("toa-table", "computed vs reference time-on-air values (CSV to stdout)"),
    ):
        p = sub.add_parser(name, help=text)
        if name != "toa-table":
            _add_common(p)
        if name == "calibrate":
            p.add_argument("--anchor-years", type=float,
                           help="override calibration.anchor_lifetime_years")
    return parser


def _overrides(args) -> dict:
    pairs = {
        "run.seed": getattr(args, "seed", None),
        "run.trials": getattr(args, "trials", None),
        "run.energy_profile": getattr(args, "energy_profile", None),
        "run.toa_source": getattr(args, "toa_source", None),
        "run.interference": getattr(args, "interference", None),
    }
    if getattr(args, "anchor_years", None) is not None:
        pairs["calibration.anchor_lifetime_years"] = args.anchor_years
    return pairs


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "toa-table":
        experiments.toa_table()
        return 0
    try:
        config = ExperimentConfig.load(args.command, args.config, _overrides(args))
        out = args.out or f"out/{args.command}.csv"
        if args.command == "run":
            experiments.run_single(config, out)
        elif args.command == "fig3":
            _, rejects = experiments.run_fig3(config, out)
            return 4 if rejects else 0
        elif args.command == "fig4":
            _, rejects = experiments.run_fig4(config, out)
            return 4 if rejects else 0
        elif args.command == "fig5":
            _, rejects = experiments.run_fig5(config, out)
            return 4 if rejects else 0
        elif args.command == "optimize":
            experiments.run_optimize(config, out)
        elif args.command == "calibrate":
            experiments.run_calibrate(config, args.out or "calibrated.profile")
    except (ConfigError, ScenarioError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CalibrationInfeasibleError as exc:
        print(f"calibration infeasible: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
