"""Command-line entry point: ``primestrings <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from primestrings import equidist, hypcheck, lab, primes
from primestrings.realexp import DEFAULT_RADIUS, PrecisionError, eval_frac, parse_poly
from primestrings.tuples import ShiftedTuple, build_admissible, check_admissible


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _span(text: str) -> tuple[int, int]:
    """``lo..hi`` or ``lo,hi``."""
    sep = ".." if ".." in text else ","
    lo, hi = text.split(sep)
    return int(float(lo)), int(float(hi))


def cmd_primes(args) -> int:
    if args.hi <= args.lo:
        raise ValueError("need lo < hi")
    if args.ap:
        a, q = _ints(args.ap)
        count = primes.pi_ap_range(args.lo - 1, args.hi - 1, a % q, q)
        listing = [p for p in primes.primes_in(args.lo, args.hi) if p % q == a % q] if args.list else None
    else:
        count = primes.count_primes(args.lo, args.hi)
        listing = list(primes.primes_in(args.lo, args.hi)) if args.list else None
    if args.json:
        out = {"lo": args.lo, "hi": args.hi, "count": count}
        if args.ap:
            out["ap"] = args.ap
        if listing is not None:
            out["primes"] = listing
        print(json.dumps(out, sort_keys=True))
    elif listing is not None:
        print("p")
        for p in listing:
            print(p)
    else:
        print(f"lo,hi,count\n{args.lo},{args.hi},{count}")
    return 0


def cmd_tuple(args) -> int:
    t = build_admissible(args.ell, args.d, args.max_d)
    out = t.to_dict()
    if args.check_admissible:
        res = check_admissible(t.h)
        out["admissible"] = res.admissible
        out["witnesses"] = {str(p): n for p, n in res.witnesses.items()}
        out["moments_exact"] = t.moment_identities_hold()
    if args.json:
        print(json.dumps(out, sort_keys=True))
    else:
        for k in sorted(out):
            print(f"{k}: {out[k]}")
    return 0


def cmd_discrepancy(args) -> int:
    F = parse_poly(args.poly)
    shifts = tuple(_ints(args.shifts))
    lo, hi = _span(args.range)
    step = max(1, (hi - lo) // args.samples) if args.samples else 1
    ns = range(lo, hi, step)
    if args.etk:
        spectrum = {}
        for m in equidist.frequencies(len(shifts), args.H):
            if -m[next(i for i, x in enumerate(m) if x)] > 0:
                continue  # filled in by conjugate symmetry
            spectrum[m] = equidist.exp_sum(F, shifts, m, (), None, lo, args.radius, hi=hi).value
        value = equidist.etk_bracket(spectrum, hi - lo, args.H)
        print(json.dumps({"mode": "etk", "H": args.H, "N": hi - lo, "bracket": value}, sort_keys=True))
    else:
        pts = [tuple(float(eval_frac(F, n + h, args.radius)) for h in shifts) for n in ns]
        value = equidist.discrepancy_exact(pts)
        print(json.dumps({"mode": "exact", "points": len(pts), "discrepancy": float(value)}, sort_keys=True))
    return 0


def cmd_expsum(args) -> int:
    F = parse_poly(args.poly)
    shifts = tuple(_ints(args.shifts))
    m = _ints(args.m)
    P = [t for t in args.P.split(",") if t.strip()] if args.P else []
    filt = equidist.RangeFilter.parse(args.filter)
    k0, k1 = _span(args.dyadic)
    series = []
    print("N,value,radius")
    for k in range(k0, k1 + 1):
        N = 2**k
        s = equidist.exp_sum(F, shifts, m, P, filt, N, args.radius)
        print(f"{N},{abs(s.value)!r},{s.radius!r}")
        if abs(s.value) > 0:
            series.append((N, abs(s.value)))
    if args.slope and len(series) >= 3:
        print(f"# slope {equidist.decay_slope(series)!r}")
    return 0


def cmd_hyp(args) -> int:
    if args.which == "bv":
        report = hypcheck.classic_bv_sum(args.N, args.theta or hypcheck.THETA_BV, args.mode, args.D)
    else:
        F = parse_poly(args.poly)
        if args.tuple_file:
            t = ShiftedTuple.from_json(Path(args.tuple_file).read_text())
        else:
            t = tuple(_ints(args.shifts))
        box = equidist.SemiOpenBox.parse(args.box)
        if args.which == "h1":
            report = hypcheck.h1_ratio(F, t, box, args.N, args.radius)
        elif args.which == "h2":
            report = hypcheck.h2_bv_sum(F, t, box, args.N, args.theta or hypcheck.THETA_H2, args.radius)
        elif args.which == "h3":
            report = hypcheck.h3_prime_bv_sum(F, t, box, args.h, args.N, args.theta or hypcheck.THETA_H3, args.radius)
        else:
            report = hypcheck.h4_concentration(F, t, box, args.N, args.theta or hypcheck.THETA_H4, args.radius)
    if args.json:
        print(json.dumps(report.to_dict(), sort_keys=True))
    else:
        print(f"{report.hypothesis} N={report.N} lhs={report.lhs!r} normalizer={report.normalizer!r} ratio={report.ratio!r}")
    return 0


def cmd_find_strings(args) -> int:
    config = lab.ExperimentConfig.load(args.config)
    if args.record_timing:
        config.record_timing = True
    report = lab.find_strings(config)
    out_dir = args.out or config.output_dir
    if out_dir:
        for p in lab.write_outputs(report, out_dir):
            print(p, file=sys.stderr)
    else:
        sys.stdout.write(lab.emit_report(report, args.format))
    code = lab.exit_code(report, config)
    if code == lab.EXIT_UNKNOWN_BUDGET:
        print(f"unknown points {report.unknown_total} exceed the budget", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="primestrings", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("primes", help="count or list primes in [lo, hi)")
    q.add_argument("--lo", type=int, required=True)
    q.add_argument("--hi", type=int, required=True)
    mode = q.add_mutually_exclusive_group()
    mode.add_argument("--count", action="store_true", help="print the count (default)")
    mode.add_argument("--list", action="store_true")
    q.add_argument("--ap", help="restrict to a residue class 'a,q'")
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_primes)

    q = sub.add_parser("tuple", help="build the admissible shift tuple")
    q.add_argument("--ell", type=int, required=True)
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--max-d", type=int, default=30)
    q.add_argument("--check-admissible", action="store_true")
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_tuple)

    q = sub.add_parser("discrepancy", help="exact discrepancy or ETK bracket of fractional-part vectors")
    q.add_argument("--poly", required=True)
    q.add_argument("--shifts", default="0")
    q.add_argument("--range", required=True, help="lo..hi")
    kind = q.add_mutually_exclusive_group()
    kind.add_argument("--exact", action="store_true", help="exact discrepancy (default)")
    kind.add_argument("--etk", action="store_true")
    q.add_argument("--H", type=int, default=4)
    q.add_argument("--samples", type=int, default=0, help="stride the range down to about this many points")
    q.add_argument("--radius", type=float, default=DEFAULT_RADIUS)
    q.set_defaults(func=cmd_discrepancy)

    q = sub.add_parser("expsum", help="exponential sums over dyadic blocks [N, 2N)")
    q.add_argument("--poly", required=True)
    q.add_argument("--shifts", default="0")
    q.add_argument("--m", default="1")
    q.add_argument("--P", default="", help="coefficients of P from the constant term up")
    q.add_argument("--filter", default="all", help="all | ap:c,q | primes | primes-ap:a,q")
    q.add_argument("--dyadic", required=True, help="k0..k1 for N = 2^k")
    q.add_argument("--slope", action="store_true")
    q.add_argument("--radius", type=float, default=DEFAULT_RADIUS)
    q.set_defaults(func=cmd_expsum)

    q = sub.add_parser("hyp", help="hypothesis checks and the classical BV sum")
    q.add_argument("--which", choices=["h1", "h2", "h3", "h4", "bv"], required=True)
    q.add_argument("--poly")
    q.add_argument("--tuple-file")
    q.add_argument("--shifts", default="0")
    q.add_argument("--box", default="0:1")
    q.add_argument("--N", type=int, required=True)
    q.add_argument("--theta", type=float)
    q.add_argument("--h", type=int, default=0, help="shift for h3")
    q.add_argument("--mode", choices=["pi", "psi"], default="pi")
    q.add_argument("--D", type=float, default=2.0)
    q.add_argument("--radius", type=float, default=DEFAULT_RADIUS)
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_hyp)

    q = sub.add_parser("find-strings", help="run an experiment config")
    q.add_argument("--config", required=True)
    q.add_argument("--out", help="directory for report.json and CSV tables")
    q.add_argument("--format", choices=["json", "csv"], default="json")
    q.add_argument("--record-timing", action="store_true")
    q.set_defaults(func=cmd_find_strings)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "hyp" and args.which != "bv" and not args.poly:
        parser.error("--poly is required for h1..h4")
    try:
        return args.func(args)
    except (ValueError, KeyError, PrecisionError, OverflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return lab.EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
