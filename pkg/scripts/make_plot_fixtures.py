#!/usr/bin/env python3
"""Produce small real result CSVs for the frontend renderer's test fixtures.

Writes one CSV of each kind (gain_sweep, rate_trace, rate_vs_power,
shape_objective) into frontend/tests/fixtures/ using trimmed desk-scale
configs so the whole thing runs in under a minute.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from beamsim.config import SystemConfig
from beamsim.orchestrate import Scenario, run_scenario

FIXTURES = Path(__file__).resolve().parents[1] / "frontend" / "tests" / "fixtures"

FAST = {
    "wmmse_max_iter": 30,
    "ris_max_sweeps": 5,
    "admm_max_iter": 100,
    "outer_max_iter": 8,
}


def main() -> int:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    cfg = SystemConfig()
    work = FIXTURES / "_work"

    run_scenario(Scenario(id="fig2", seeds=1), cfg, outdir=work / "fig2")
    (FIXTURES / "shape_objective.csv").write_bytes(
        (work / "fig2" / "shape_objective.csv").read_bytes()
    )

    run_scenario(Scenario(id="fig5", seeds=1), cfg, outdir=work / "fig5")
    (FIXTURES / "gain_sweep.csv").write_bytes(
        (work / "fig5" / "gain_sweep.csv").read_bytes()
    )

    run_scenario(
        Scenario(id="custom", overrides=FAST, seeds=3), cfg, outdir=work / "custom"
    )
    (FIXTURES / "rate_trace.csv").write_bytes(
        (work / "custom" / "rate_trace.csv").read_bytes()
    )

    sweep = {"p_max_dbm": [-80.0, -70.0, -60.0]}
    run_scenario(
        Scenario(id="fig10", overrides=FAST, seeds=3, sweep=sweep),
        cfg,
        outdir=work / "fig10",
    )
    (FIXTURES / "rate_vs_power.csv").write_bytes(
        (work / "fig10" / "rate_vs_power.csv").read_bytes()
    )

    for kind in ("shape_objective", "gain_sweep", "rate_trace", "rate_vs_power"):
        print(f"fixture ready: {FIXTURES / (kind + '.csv')}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
