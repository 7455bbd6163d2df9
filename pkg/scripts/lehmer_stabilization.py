#!/usr/bin/env python3
"""Lehmer measure vs split count M for a single seed (default k=17).

Prints a CSV of certified measure intervals per M and reports on stderr
the first M at which the per-step change drops below 1e-4. Extra
arguments pass through, e.g.:

    python3 scripts/lehmer_stabilization.py --k 17 --max-M 25
"""
import sys

from machinpi.cli import main

if __name__ == "__main__":
    sys.exit(main(["experiments", "lehmer-stabilization", *sys.argv[1:]]))
