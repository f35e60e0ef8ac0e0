#!/usr/bin/env python3
"""Sweep the closed-loop phase and watch the regime flip.

At fixed balanced amplitudes the interference regime moves from the
N-type chain (absorbing at line center) through the full loop to the
lambda reduction (transparent at line center) as the loop phase goes
0 -> pi.  One CSV row per phase point.
"""

import math
import sys

from eitlab.cli import main


def run(out_dir: str = "results/phase_scan", points: str = "25") -> int:
    return main([
        "scan", "--config", "fig4b",
        "--sweep", "phi",
        "--sweep-start", "0.0",
        "--sweep-stop", str(math.pi),
        "--sweep-points", points,
        "--out", out_dir,
    ])


if __name__ == "__main__":
    sys.exit(run(*sys.argv[1:]))
