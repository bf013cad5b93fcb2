#!/usr/bin/env python3
"""Second-order Taylor remainder fits for both models."""

import sys

from besovlab.cli import main

if __name__ == "__main__":
    code = 0
    for model in ("ch", "novikov"):
        code |= main([
            "taylor", "--model", model, "--t-min", "1e-3", "--t-max", "1e-1",
            "--points", "8", "--out", f"results/taylor_{model}",
            *sys.argv[1:],
        ])
    sys.exit(code)
