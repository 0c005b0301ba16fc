#!/usr/bin/env python3
"""Compare the hull-relaxation solver against exhaustive enumeration on tiny
randomized scenes and print the per-trial optimality gap."""

import sys
from pathlib import Path

from mimowave.cli import main

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "tiny_oracle.cfg"


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/oracle"
    code = main(["oracle", "--config", str(CONFIG), "--out", out])
    if code == 0:
        print((Path(out) / "oracle_gap.csv").read_text())
    sys.exit(code)
