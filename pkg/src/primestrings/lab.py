"""End-to-end search for strings of consecutive primes in ``A = {n : {F(n)} in U}``.

Two search modes run over the same range and their results are merged:

* ``tuple``: recentre ``U`` so that it contains ``||x|| < eps``, build the
  admissible tuple, and scan for ``n`` whose leading coordinates land in the
  shrunk box ``[0, Delta)^ell``.  Primes among ``n + h_j`` that are adjacent in
  the global prime order form strings.
* ``direct``: test ``{F(p)} in U`` for every prime in range and collect runs.

Every reported string is re-verified at doubled precision.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from primestrings import hypcheck
from primestrings.equidist import (
    SemiOpenBox,
    Verdict,
    certified_near_integer,
    discrepancy_exact,
    interval_verdicts,
    membership_array,
)
from primestrings.primes import consecutive_prime_strings, count_primes, primes_in
from primestrings.realexp import (
    DEFAULT_RADIUS,
    MAX_PREC,
    RealExpPoly,
    eval_frac,
    exact_value,
    parse_poly,
    to_fraction,
)
from primestrings.tuples import ShiftedTuple, build_admissible, shrink_delta

WINDOW_LIMIT = 10**8
EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN_BUDGET = 0, 1, 2


# ---------------------------------------------------------------------------
# Target sets


_INTERVAL_RE = re.compile(r"^\s*([\[(])\s*([^,\s]+)\s*,\s*([^,\s]+)\s*([)\]])\s*$")


@dataclass(frozen=True)
class Interval:
    u: Fraction
    v: Fraction
    left_closed: bool = True
    right_closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "u", to_fraction(self.u))
        object.__setattr__(self, "v", to_fraction(self.v))
        if not 0 <= self.u < self.v <= 1:
            raise ValueError(f"need 0 <= u < v <= 1, got {self}")
        if self.right_closed and self.v == 1:
            raise ValueError("intervals live in [0, 1): v = 1 must be open")

    @classmethod
    def parse(cls, text: str) -> "Interval":
        m = _INTERVAL_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse interval {text!r}; expected e.g. '[0, 0.1)' or '(0.9, 1)'")
        return cls(to_fraction(m.group(2)), to_fraction(m.group(3)), m.group(1) == "[", m.group(4) == "]")

    @property
    def length(self) -> Fraction:
        return self.v - self.u

    def contains_exact(self, x: Fraction) -> bool:
        lo_ok = self.u <= x if self.left_closed else self.u < x
        hi_ok = x <= self.v if self.right_closed else x < self.v
        return lo_ok and hi_ok

    def __str__(self) -> str:
        return f"{'[' if self.left_closed else '('}{self.u},{self.v}{']' if self.right_closed else ')'}"


@dataclass(frozen=True)
class TargetSet:
    """A finite union of disjoint intervals inside ``[0, 1)``."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        if not self.intervals:
            raise ValueError("U must be nonempty")
        ivs = tuple(sorted(self.intervals, key=lambda iv: (iv.u, iv.v)))
        for a, b in zip(ivs, ivs[1:]):
            if b.u < a.v or (b.u == a.v and a.right_closed and b.left_closed):
                raise ValueError(f"intervals {a} and {b} overlap")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def parse(cls, items: Sequence[str] | str) -> "TargetSet":
        if isinstance(items, str):
            items = [t for t in re.split(r"\s*(?:U|∪|;)\s*", items) if t.strip()]
        return cls(tuple(Interval.parse(t) for t in items))

    @property
    def measure(self) -> Fraction:
        return sum((iv.length for iv in self.intervals), Fraction(0))

    def contains_exact(self, x: Fraction) -> bool:
        return any(iv.contains_exact(x) for iv in self.intervals)

    def verdicts(
        self, F: RealExpPoly, ns: Sequence[int], target_radius: float = DEFAULT_RADIUS, max_prec: int = MAX_PREC
    ) -> np.ndarray:
        """int8 verdicts for ``{F(n)} in U``."""
        ns = [int(n) for n in ns]
        any_in = np.zeros(len(ns), dtype=bool)
        all_out = np.ones(len(ns), dtype=bool)
        for iv in self.intervals:
            got = interval_verdicts(F, ns, iv.u, iv.v, target_radius, max_prec)
            if not iv.left_closed or iv.right_closed:
                # endpoints differ from [u, v) only at exactly rational values
                for i in np.flatnonzero(got != Verdict.UNKNOWN).tolist():
                    x = exact_value(F, ns[i])
                    if x is not None:
                        got[i] = Verdict.IN if iv.contains_exact(x - math.floor(x)) else Verdict.OUT
            any_in |= got == Verdict.IN
            all_out &= got == Verdict.OUT
        out = np.full(len(ns), Verdict.UNKNOWN, dtype=np.int8)
        out[all_out] = Verdict.OUT
        out[any_in] = Verdict.IN
        return out

    def __str__(self) -> str:
        return " U ".join(str(iv) for iv in self.intervals)


def normalize_target(U: TargetSet) -> tuple[Fraction, Fraction]:
    """``(eps, c)`` with ``(1-eps, 1) U [0, eps)`` inside ``U + c`` mod 1.

    Touching intervals are merged, including across 1 = 0; the longest arc
    ``[u, v)`` is centred on 0, so ``eps = (v - u)/2`` and ``c = 1 - (u + v)/2``.
    """
    arcs: list[list[Fraction]] = []
    for iv in U.intervals:
        if arcs and arcs[-1][1] == iv.u:
            arcs[-1][1] = iv.v
        else:
            arcs.append([iv.u, iv.v])
    if len(arcs) > 1 and arcs[-1][1] == 1 and arcs[0][0] == 0:
        last = arcs.pop()
        arcs[0] = [last[0] - 1, arcs[0][1]]
    u, v = max(arcs, key=lambda a: a[1] - a[0])
    if v - u >= 1:
        # the whole circle: any eps < 1 works
        return Fraction(1, 2), Fraction(0)
    eps = (v - u) / 2
    c = (1 - (u + v) / 2) % 1
    return eps, c


# ---------------------------------------------------------------------------
# Configuration and report


@dataclass
class ExperimentConfig:
    poly: str
    U: list[str]
    m: int
    lo: int
    hi: int
    d: int | None = None
    theta_h2: float = hypcheck.THETA_H2
    theta_h3: float = hypcheck.THETA_H3
    theta_h4: float = hypcheck.THETA_H4
    theta_bv: float = hypcheck.THETA_BV
    delta: float = hypcheck.DELTA
    target_radius: float = DEFAULT_RADIUS
    max_prec: int = MAX_PREC
    unknown_budget: float = 1e-6
    hypotheses: bool = True
    hyp_N: int | None = None
    hyp_box: str = "shrunk"
    discrepancy_samples: int = 1000
    window_limit: int = WINDOW_LIMIT
    record_timing: bool = False
    output_dir: str | None = None
    name: str = "experiment"

    def __post_init__(self):
        if isinstance(self.U, str):
            self.U = [str(iv) for iv in TargetSet.parse(self.U).intervals]
        if self.m < 1:
            raise ValueError("m must be positive")
        if not 1 <= self.lo < self.hi:
            raise ValueError("need 1 <= lo < hi")
        if self.hyp_box not in ("shrunk", "target"):
            raise ValueError("hyp_box is 'shrunk' or 'target'")
        if self.target.measure <= 0:
            raise ValueError("U must have positive measure")
        if self.d is not None and self.d < self.F.ell:
            raise ValueError(f"d = {self.d} is below ell = {self.F.ell}")

    @property
    def F(self) -> RealExpPoly:
        return parse_poly(self.poly)

    @property
    def target(self) -> TargetSet:
        return TargetSet.parse(self.U)

    @property
    def d_effective(self) -> int:
        return self.d if self.d is not None else max(self.F.ell, self.m + 2)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class StringRecord:
    first_index: int
    primes: list[int]
    diameter: int
    provenance: list[str]
    window_n: int | None = None
    within_tuple_bound: bool = True


@dataclass
class ExperimentReport:
    name: str
    poly: str
    U: str
    m: int
    lo: int
    hi: int
    eps: str
    c: str
    delta: str
    tuple: dict
    counts: dict
    n0: int
    violations: list[int]
    strings: list[StringRecord]
    hypotheses: list[dict]
    discrepancy_series: list[list]
    notes: list[str]
    timing: dict | None = None

    @property
    def unknown_total(self) -> int:
        c = self.counts
        return c["unknown_box"] + c["unknown_check"] + c["unknown_direct"]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentReport":
        data = dict(data)
        data["strings"] = [StringRecord(**s) for s in data["strings"]]
        return cls(**data)


def empty_counts() -> dict:
    return {
        "scanned": 0,
        "b_hits": 0,
        "prime_hits": 0,
        "a_primes": 0,
        "unknown_box": 0,
        "unknown_check": 0,
        "unknown_direct": 0,
        "violations": 0,
    }


# ---------------------------------------------------------------------------
# Pipeline


def _tuple_scan(F_c, t, eps, delta, lo, hi, prime_arr, base_index, m, target_radius, counts):
    """Shrunk-box scan; returns (tuple-window strings, violations)."""
    box = SemiOpenBox.cube(0, delta, t.ell)
    verdicts = membership_array(F_c, t.leading, box, lo, hi, target_radius)
    counts["unknown_box"] += int(np.count_nonzero(verdicts == Verdict.UNKNOWN))
    hits = lo + np.flatnonzero(verdicts == Verdict.IN)
    counts["b_hits"] += len(hits)
    shifts = np.asarray(t.h, dtype=np.int64)
    found, violations = [], []
    for n in hits.tolist():
        ok = True
        for hj in t.h:
            v = certified_near_integer(F_c, n + hj, eps, target_radius)
            if v != Verdict.IN:
                ok = False
                if v == Verdict.OUT:
                    violations.append(n)
                else:
                    counts["unknown_check"] += 1
                break
        if not ok:
            continue
        xs = n + shifts
        pos = np.searchsorted(prime_arr, xs)
        is_p = (pos < len(prime_arr)) & (prime_arr[np.minimum(pos, len(prime_arr) - 1)] == xs)
        counts["prime_hits"] += int(np.count_nonzero(is_p))
        tp, ti = xs[is_p].tolist(), pos[is_p].tolist()
        run = []
        for p, i in zip(tp, ti):
            if run and i != run[-1][1] + 1:
                found.extend(_windows(run, m, base_index, n))
                run = []
            run.append((p, i))
        found.extend(_windows(run, m, base_index, n))
    return found, violations


def _windows(run, m, base_index, n):
    out = []
    for k in range(len(run) - m + 1):
        chunk = run[k : k + m]
        out.append((base_index + chunk[0][1] + 1, tuple(p for p, _ in chunk), n))
    return out


def _discrepancy_series(F, lo, hi, samples, target_radius):
    # whole block when it is small enough, else a seeded uniform sample
    series = []
    N = 1
    while 2 * N <= hi:
        if N >= lo:
            if N <= samples:
                ns = np.arange(N, 2 * N)
            else:
                rng = np.random.default_rng(N)
                ns = np.sort(rng.choice(np.arange(N, 2 * N), samples, replace=False))
            pts = [float(eval_frac(F, int(n), target_radius)) for n in ns]
            series.append([N, len(pts), float(discrepancy_exact(pts))])
        N *= 2
    return series


def hypothesis_setup(config: ExperimentConfig) -> tuple[RealExpPoly, ShiftedTuple, SemiOpenBox]:
    """The ``(poly, tuple, box)`` whose B-set the hypothesis checks examine.

    ``hyp_box = "shrunk"`` uses ``F + c`` with the cube ``[0, Delta)^ell``;
    ``"target"`` uses ``F`` with the longest target interval repeated ``ell`` times.
    """
    F = config.F
    eps, c = normalize_target(config.target)
    t = build_admissible(F.ell, config.d_effective)
    if config.hyp_box == "shrunk":
        return F.shifted(c), t, SemiOpenBox.cube(0, shrink_delta(t, eps), t.ell)
    iv = max(config.target.intervals, key=lambda iv: iv.length)
    return F, t, SemiOpenBox.cube(iv.u, iv.v, t.ell)


def _hypothesis_reports(config, notes):
    N = config.hyp_N or hypcheck.default_hyp_N(config.lo, config.hi)
    if N is None:
        notes.append("hypotheses skipped: no dyadic block [N, 2N) fits in the scan range")
        return []
    G, t, box = hypothesis_setup(config)
    reports = []
    jobs = [
        ("H1", lambda: hypcheck.h1_ratio(G, t, box, N, config.target_radius)),
        ("H2", lambda: hypcheck.h2_bv_sum(G, t, box, N, config.theta_h2, config.target_radius)),
        ("H3", lambda: hypcheck.h3_prime_bv_sum(G, t, box, 0, N, config.theta_h3, config.target_radius)),
        ("H4", lambda: hypcheck.h4_concentration(G, t, box, N, config.theta_h4, config.target_radius)),
        ("BV", lambda: hypcheck.classic_bv_sum(2 * N, config.theta_bv)),
    ]
    for name, job in jobs:
        try:
            reports.append(job().to_dict())
        except ValueError as exc:
            notes.append(f"{name} at N={N}: {exc}")
    return reports


def _reverify(F, U, strings, config):
    """Re-check members at doubled precision and consecutiveness against a fresh sieve."""
    radius = config.target_radius**2
    kept, dropped = [], []
    for rec in strings:
        verdicts = U.verdicts(F, rec.primes, radius, 2 * config.max_prec)
        fresh = primes_in(rec.primes[0], rec.primes[-1] + 1).primes.tolist()
        if np.all(verdicts == Verdict.IN) and fresh == rec.primes:
            kept.append(rec)
        else:
            dropped.append(rec)
    return kept, dropped


def find_strings(config: ExperimentConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    F = config.F
    U = config.target
    notes: list[str] = []
    counts = empty_counts()
    counts["scanned"] = config.hi - config.lo
    eps, c = normalize_target(U)
    F_c = F.shifted(c)
    ell = F.ell
    d = config.d_effective
    t = build_admissible(ell, d)
    if config.lo < t.h[-1] + 1:
        raise ValueError(f"lo = {config.lo} must be at least h_d + 1 = {t.h[-1] + 1}")
    delta = shrink_delta(t, eps)

    timing = {}
    tick = time.perf_counter()
    tuple_mode = F.theorem_eligible and t.h[-1] <= config.window_limit
    if not F.theorem_eligible:
        notes.append("tuple mode skipped: leading exponent is an integer")
    elif not tuple_mode:
        notes.append(f"tuple mode skipped: h_d = {t.h[-1]} exceeds the window limit {config.window_limit}")

    span_hi = config.hi + (t.h[-1] if tuple_mode else 0)
    prime_arr = primes_in(max(config.lo, 2), span_hi).primes if span_hi > max(config.lo, 2) else np.empty(0, np.int64)
    base_index = count_primes(2, config.lo)

    raw: dict[tuple, StringRecord] = {}
    violations: list[int] = []
    if tuple_mode:
        found, violations = _tuple_scan(
            F_c, t, eps, delta, config.lo, config.hi, prime_arr, base_index, config.m, config.target_radius, counts
        )
        for idx, ps, n in found:
            key = (idx, ps)
            if key not in raw:
                raw[key] = StringRecord(idx, list(ps), ps[-1] - ps[0], ["tuple"], n, True)
    counts["violations"] = len(violations)
    timing["tuple_scan"] = time.perf_counter() - tick

    # direct mode: every prime of the range tested against U itself
    tick = time.perf_counter()
    in_range = prime_arr[prime_arr < config.hi] if len(prime_arr) else prime_arr
    verdicts = U.verdicts(F, in_range.tolist(), config.target_radius, config.max_prec)
    counts["unknown_direct"] = int(np.count_nonzero(verdicts == Verdict.UNKNOWN))
    members = set(in_range[verdicts == Verdict.IN].tolist())
    counts["a_primes"] = len(members)
    bound = t.h[-1] - t.h[0]
    for s in consecutive_prime_strings(config.lo, config.hi, members.__contains__, config.m):
        key = (s.first_index, s.primes)
        if key in raw:
            raw[key].provenance.append("direct")
        else:
            raw[key] = StringRecord(s.first_index, list(s.primes), s.diameter, ["direct"], None, s.diameter <= bound)
    timing["direct_scan"] = time.perf_counter() - tick

    tick = time.perf_counter()
    strings = sorted(raw.values(), key=lambda r: (r.first_index, r.primes))
    strings, dropped = _reverify(F, U, strings, config)
    if dropped:
        notes.append(f"{len(dropped)} strings failed re-verification and were dropped")
    for rec in strings:
        if "tuple" in rec.provenance and not rec.within_tuple_bound:
            raise AssertionError(f"tuple-window string {rec.primes} exceeds the tuple diameter")
    timing["reverify"] = time.perf_counter() - tick

    tick = time.perf_counter()
    hyps = _hypothesis_reports(config, notes) if config.hypotheses else []
    timing["hypotheses"] = time.perf_counter() - tick
    tick = time.perf_counter()
    series = _discrepancy_series(F, config.lo, config.hi, config.discrepancy_samples, config.target_radius)
    timing["discrepancy"] = time.perf_counter() - tick
    timing["total"] = time.perf_counter() - t0

    n0 = violations[-1] + 1 if violations else config.lo
    return ExperimentReport(
        name=config.name,
        poly=str(F),
        U=str(U),
        m=config.m,
        lo=config.lo,
        hi=config.hi,
        eps=str(eps),
        c=str(c),
        delta=str(delta),
        tuple=t.to_dict(),
        counts=counts,
        n0=n0,
        violations=violations,
        strings=strings,
        hypotheses=hyps,
        discrepancy_series=series,
        notes=notes,
        timing={k: round(v, 3) for k, v in timing.items()} if config.record_timing else None,
    )


def exit_code(report: ExperimentReport, config: ExperimentConfig) -> int:
    frac = report.unknown_total / max(report.counts["scanned"], 1)
    return EXIT_UNKNOWN_BUDGET if frac > config.unknown_budget else EXIT_OK


# ---------------------------------------------------------------------------
# Serialization


def report_json(report: ExperimentReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def strings_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["first_index"] + [f"p{i + 1}" for i in range(report.m)] + ["K", "provenance"])
    for s in report.strings:
        w.writerow([s.first_index, *s.primes, s.diameter, "+".join(s.provenance)])
    return buf.getvalue()


def hypotheses_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["hypothesis", "N", "param", "lhs", "normalizer", "ratio", "unknown"])
    for h in report.hypotheses:
        w.writerow([h["hypothesis"], h["N"], repr(h["param"]), repr(h["lhs"]), repr(h["normalizer"]), repr(h["ratio"]), h["unknown"]])
    return buf.getvalue()


def discrepancy_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "samples", "discrepancy"])
    for N, k, D in report.discrepancy_series:
        w.writerow([N, k, repr(D)])
    return buf.getvalue()


def emit_report(report: ExperimentReport, fmt: str = "json", path: str | Path | None = None) -> str:
    """Serialize ``report``; ``csv`` gives the strings table.  Writes to ``path`` when given."""
    if fmt == "json":
        text = report_json(report)
    elif fmt == "csv":
        text = strings_csv(report)
    else:
        raise ValueError("format is 'json' or 'csv'")
    if path is not None:
        Path(path).write_text(text)
    return text


def parse_report(text: str) -> ExperimentReport:
    return ExperimentReport.from_dict(json.loads(text))


def write_outputs(report: ExperimentReport, out_dir: str | Path) -> list[Path]:
    """``report.json`` plus CSV tables for strings, hypothesis ratios and the discrepancy series."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "report.json": report_json(report),
        "strings.csv": strings_csv(report),
        "hypotheses.csv": hypotheses_csv(report),
        "discrepancy.csv": discrepancy_csv(report),
    }
    paths = []
    for name, text in files.items():
        p = out / name
        p.write_text(text)
        paths.append(p)
    return paths
