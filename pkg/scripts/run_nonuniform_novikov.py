#!/usr/bin/env python3
"""Cubic-model gap experiment at the standard ranges (n=5..8)."""

import sys

from besovlab.cli import main

if __name__ == "__main__":
    sys.exit(
        main([
            "nonuniform", "--model", "novikov", "--n-min", "5", "--n-max", "8",
            "--t", "0.02,0.05,0.1", "--out", "results/nonuniform_novikov",
            *sys.argv[1:],
        ])
    )
