"""Write the separation table for a grid of (l, k) values.

    python scripts/run_sweep.py --grid 2,2 2,4 4,2 --out sweep.csv
"""
import argparse
import logging
import sys
from pathlib import Path

from addrlift import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--grid", nargs="+", type=cli._grid_cell, default=list(cli.DEFAULT_GRID))
    ap.add_argument("--eps", type=float, default=1 / 3)
    ap.add_argument("--guard-n", type=int, default=14)
    ap.add_argument("--out")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    text = cli.cmd_sweep(args.grid, args.eps, 0.99, args.guard_n, "auto")
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
