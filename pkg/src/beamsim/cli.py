"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, SolverError, SystemConfig, load_config
from .orchestrate import SCENARIOS, Scenario, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamsim",
        description="Wideband THz RIS link simulator and beamforming optimizer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a registered scenario")
    run.add_argument("--config", required=True, help="JSON config path")
    run.add_argument(
        "--scenario", required=True, help=f"one of: {', '.join(sorted(SCENARIOS))}"
    )
    run.add_argument("--seed", type=int, default=None, help="base seed override")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seeds", type=int, default=10, help="number of seeds")

    sweep = sub.add_parser("gain-sweep", help="beam-split gain sweep (fig5 plans)")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out", required=True)

    validate = sub.add_parser("validate", help="schema-check a config document")
    validate.add_argument("--config", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg, geometry = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        print(f"config ok: {args.config}")
        return EXIT_OK

    try:
        if args.command == "gain-sweep":
            scenario = Scenario(id="fig5", seeds=1)
            run_scenario(scenario, cfg, geometry, outdir=args.out)
            print(f"wrote gain sweep to {args.out}")
            return EXIT_OK

        if args.seed is not None:
            cfg = cfg.replace(seed=args.seed)
        scenario = Scenario(id=args.scenario, seeds=args.seeds)
        run_scenario(scenario, cfg, geometry, outdir=args.out)
        print(f"wrote scenario {args.scenario} results to {args.out}")
        return EXIT_OK
    except (KeyError, ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
