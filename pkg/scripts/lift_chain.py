"""Norm of the uncompleted composition against the (D/10) log2 l floor, with the
degree-reduction pipeline run on the LP witness.

    python scripts/lift_chain.py 2,2 4,2 2,4
"""
import argparse
import json

from addrlift import cli, liftlab


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("grid", nargs="*", type=cli._grid_cell, default=list(cli.DEFAULT_GRID))
    args = ap.parse_args()
    for l, k in args.grid:
        print(json.dumps(liftlab.lift_bound_check(l, k).to_json(), sort_keys=True))


if __name__ == "__main__":
    main()
