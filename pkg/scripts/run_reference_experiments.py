#!/usr/bin/env python3
"""Run the full reference experiment set: single solve, continuous baseline,
beampattern export, and the sample-count sweep. Results land under out/."""

import sys
from pathlib import Path

from mimowave.cli import main

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "reference_scenario.cfg"


def run_all(out_root: str = "out") -> int:
    for command in ("solve", "baseline", "beampattern", "sweep"):
        out = f"{out_root}/{command}"
        print(f"== {command} -> {out}")
        code = main([command, "--config", str(CONFIG), "--out", out])
        if code != 0:
            print(f"{command} failed with exit code {code}", file=sys.stderr)
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run_all(*sys.argv[1:]))
