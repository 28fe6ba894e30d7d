#!/usr/bin/env python3
"""Emit every closed-form probability table.

Prints the per-parity Dicke table, the single-excitation comparison
against the interference baseline, and the half-filled scaling table.
Pass --json for canonical JSON payloads and --out-dir to write one file
per table.
"""
import argparse
import sys
from pathlib import Path

from qparity.cli import main as qparity_main

FAMILIES = ["dicke", "w-compare", "halfdicke-scaling"]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=12)
    parser.add_argument("--json", action="store_true")
    parser.add_argument("--out-dir", default=None)
    args = parser.parse_args()
    if args.out_dir:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
    worst = 0
    for family in FAMILIES:
        argv = ["table", "--family", family, "--max-n", str(args.max_n)]
        if args.json:
            argv.append("--json")
        if args.out_dir:
            suffix = "json" if args.json else "txt"
            argv += ["--out", str(Path(args.out_dir) / f"table_{family}.{suffix}")]
        else:
            print(f"== {family} (max n = {args.max_n}) ==")
        worst = max(worst, qparity_main(argv))
        if not args.out_dir:
            print()
    return worst


if __name__ == "__main__":
    sys.exit(main())
