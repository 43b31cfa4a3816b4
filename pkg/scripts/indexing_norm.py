"""Approximate spectral norm of PARITY_n composed with IND_1 (3n bits).

Prints the LP value, a weak-duality lower bound recomputed from the dual
weights, and the reference 2^(cD) with D the 2/3-approximate degree of PARITY_n
and c = 1 - 3/D - 0.01. n = 4 is a 12-bit LP: about half a minute and 1.6 GB.

    python scripts/indexing_norm.py 2 3 4
"""
import argparse
import logging
import time

from addrlift import approxlp
from addrlift.boolfn import parity
from addrlift.constructions import compose, make_indexing


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("n", type=int, nargs="+")
    ap.add_argument("--backend", default="auto", choices=["auto", "simplex", "ipm"])
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    print("n  bits  D  norm          dual_bound    reference  seconds")
    for n in args.n:
        t = time.perf_counter()
        D = int(approxlp.approx_degree(parity(n), 2 / 3).value)
        F, _ = compose(parity(n), make_indexing(1))
        res = approxlp.approx_spectral_norm(F, 1 / 3, backend=args.backend)
        lower = approxlp.dual_lower_bound(F, 1 / 3, res.lp.duals)
        ref = 2 ** ((1 - 3 / D - 0.01) * D)
        print(f"{n}  {F.n:4d}  {D}  {res.value:12.8f}  {lower:12.8f}  {ref:9.4f}  {time.perf_counter() - t:7.1f}")


if __name__ == "__main__":
    main()
