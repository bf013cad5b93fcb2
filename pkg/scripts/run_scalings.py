#!/usr/bin/env python3
"""Scaling reports for family members n = 4..8 (grid chosen automatically)."""

import sys

from besovlab.cli import main

if __name__ == "__main__":
    sys.exit(
        main(["lemma31", "--n-min", "4", "--n-max", "8", "--out", "results/scalings",
              *sys.argv[1:]])
    )
