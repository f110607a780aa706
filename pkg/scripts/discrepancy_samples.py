"""Discrepancy of {sqrt n} on [N, 2N) under several sampling schemes.

The full block is the quantity of interest.  Equal-size subsamples behave
differently: an evenly strided sample of a slowly varying sequence is a
rescaled copy of a smaller block, a random sample carries noise of order
1/sqrt(S), and a contiguous block depends on where it starts.
"""

import argparse

import numpy as np

from primestrings.equidist import discrepancy_exact
from primestrings.realexp import eval_frac, parse_poly


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--poly", default="x^0.5")
    ap.add_argument("--k", type=int, nargs="+", default=[10, 12, 14, 16])
    ap.add_argument("--S", type=int, default=1024, help="sample size for the subsampling schemes")
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()

    F = parse_poly(args.poly)

    def D(ns):
        return discrepancy_exact([float(eval_frac(F, int(n))) for n in ns], {1: 1 << 22})

    print("N,full,spread,contiguous,random_mean,random_min,random_max")
    for k in args.k:
        N = 2**k
        S = min(args.S, N)
        full = D(range(N, 2 * N))
        spread = D([N + (j * N) // S for j in range(S)])
        contiguous = D(range(N, N + S))
        rnd = [D(np.random.default_rng(s).choice(np.arange(N, 2 * N), S, replace=False)) for s in range(args.seeds)]
        print(f"{N},{full:.5f},{spread:.5f},{contiguous:.5f},{np.mean(rnd):.5f},{min(rnd):.5f},{max(rnd):.5f}")


if __name__ == "__main__":
    main()
