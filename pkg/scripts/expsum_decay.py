"""Dyadic exponential sums |sum_{N <= n < 2N} e(m F(n))| and their fitted growth exponent."""

import argparse

from primestrings.equidist import RangeFilter, decay_slope, exp_sum
from primestrings.realexp import parse_poly


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--poly", default="x^0.5")
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--k0", type=int, default=10)
    ap.add_argument("--k1", type=int, default=18)
    ap.add_argument("--filter", default="all", help="all | primes | ap:c,q | primes-ap:a,q")
    args = ap.parse_args()

    F = parse_poly(args.poly)
    filt = RangeFilter.parse(args.filter)
    series = []
    print("N,abs_sum,count,radius")
    for k in range(args.k0, args.k1 + 1):
        s = exp_sum(F, [0], [args.m], filt=filt, N=2**k)
        series.append((2**k, abs(s.value)))
        print(f"{2**k},{abs(s.value):.6f},{s.count},{s.radius:.2e}")
    print(f"# slope of log|S| against log N: {decay_slope(series):.4f}")


if __name__ == "__main__":
    main()
