#!/usr/bin/env python3
"""Digit-doubling study: certified correct digits of pi vs split count M.

Runs the k=6 column by default (M = 0..12, iterative_gh kernel) and prints
a CSV with the widely reproduced reference column alongside. Any extra
arguments are passed straight through, e.g.:

    python3 scripts/table1.py --k 6 --max-M 12 --output table1.csv

Exits 1 if any computed row falls outside +-1 of the reference column
(one such row is expected; see README).
"""
import sys

from machinpi.cli import main

if __name__ == "__main__":
    sys.exit(main(["experiments", "table1", *sys.argv[1:]]))
