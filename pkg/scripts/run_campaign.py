#!/usr/bin/env python3
"""Random-state classification campaign with closed-form/oracle cross-check.

Usage: python scripts/run_campaign.py [count] [seed] [output.jsonl]
"""

import sys

from gausssep.cli import main

if __name__ == "__main__":
    count = sys.argv[1] if len(sys.argv) > 1 else "10000"
    seed = sys.argv[2] if len(sys.argv) > 2 else "0"
    out = sys.argv[3] if len(sys.argv) > 3 else "campaign.jsonl"
    raise SystemExit(main([
        "sample", "--count", count, "--seed", seed, "--output", out,
    ]))
