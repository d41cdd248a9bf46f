#!/usr/bin/env python3
"""Regenerate every figure-style result CSV under results/<scenario>/.

The analysis sweeps (fig2-fig5) are instant; the optimization scenarios
run 10 seeds each and take a few minutes at desk scale. Pass scenario ids
to run a subset, and --seeds to trade accuracy for time.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from beamsim.config import SystemConfig
from beamsim.orchestrate import SCENARIOS, Scenario, run_scenario

FAST_OVERRIDES = {
    "wmmse_max_iter": 40,
    "ris_max_sweeps": 8,
    "admm_max_iter": 150,
    "outer_max_iter": 12,
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("scenarios", nargs="*", default=[], help="subset of ids")
    parser.add_argument("--out", default="results", help="output root")
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument(
        "--full", action="store_true", help="use untrimmed solver iteration caps"
    )
    args = parser.parse_args()

    ids = args.scenarios or sorted(SCENARIOS)
    overrides = {} if args.full else dict(FAST_OVERRIDES)
    cfg = SystemConfig()
    for sid in ids:
        outdir = Path(args.out) / sid
        start = time.perf_counter()
        run_scenario(
            Scenario(id=sid, overrides=overrides, seeds=args.seeds),
            cfg,
            outdir=outdir,
        )
        print(f"{sid}: wrote {outdir} ({time.perf_counter() - start:.1f}s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
