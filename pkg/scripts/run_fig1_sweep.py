#!/usr/bin/env python3
"""Produce the S/P fold-comparison table (m1 = 0.5, m2 = 1) as CSV.

Usage: python scripts/run_fig1_sweep.py [output.csv]
"""

import sys

from gausssep.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "fig1_folds.csv"
    raise SystemExit(main(["sweep", "--fig1", "--output", out]))
