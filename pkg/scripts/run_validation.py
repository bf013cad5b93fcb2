#!/usr/bin/env python3
"""Run the cross-module invariant suite with the default seed."""

import sys

from besovlab.cli import main

if __name__ == "__main__":
    sys.exit(main(["validate", "--seed", "0", *sys.argv[1:]]))
