"""Fractional-part vectors, boxes, discrepancy and exponential sums."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from flint import arb

from primestrings import primes as _primes
from primestrings.realexp import (
    DEFAULT_RADIUS,
    MAX_PREC,
    PrecisionError,
    RealExpPoly,
    RigorousReal,
    START_PREC,
    eval_ball,
    eval_ball_raw,
    eval_frac,
    frac_part,
    start_precision,
    to_arb,
    to_fraction,
    working_precision,
)

# radii tried in turn when a verdict is Unknown
ESCALATION = (2.0**-40, 2.0**-100, 2.0**-250, 2.0**-600, 2.0**-1500, 2.0**-3500)


class Verdict(IntEnum):
    OUT = 0
    IN = 1
    UNKNOWN = -1


# ---------------------------------------------------------------------------
# Boxes and filters


@dataclass(frozen=True)
class SemiOpenBox:
    """``prod [u_i, v_i)`` inside ``[0, 1]^ell`` with exact rational edges."""

    bounds: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if not self.bounds:
            raise ValueError("box needs at least one side")
        norm = tuple((to_fraction(u), to_fraction(v)) for u, v in self.bounds)
        for u, v in norm:
            if not 0 <= u < v <= 1:
                raise ValueError(f"need 0 <= u < v <= 1, got [{u}, {v})")
        object.__setattr__(self, "bounds", norm)

    @classmethod
    def unit(cls, ell: int) -> "SemiOpenBox":
        return cls(((Fraction(0), Fraction(1)),) * ell)

    @classmethod
    def cube(cls, u, v, ell: int) -> "SemiOpenBox":
        return cls(((u, v),) * ell)

    @classmethod
    def parse(cls, text: str) -> "SemiOpenBox":
        """``"u1:v1,u2:v2"``; a single ``"u:v"`` with ``^k`` suffix repeats it ``k`` times."""
        text = text.strip()
        reps = 1
        if "^" in text:
            text, k = text.rsplit("^", 1)
            reps = int(k)
        sides = []
        for part in text.split(","):
            u, v = part.split(":")
            sides.append((to_fraction(u.strip()), to_fraction(v.strip())))
        return cls(tuple(sides) * reps)

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def measure(self) -> Fraction:
        return math.prod((v - u for u, v in self.bounds), start=Fraction(1))

    def __str__(self) -> str:
        return ",".join(f"{u}:{v}" for u, v in self.bounds)


@dataclass(frozen=True)
class FracVector:
    coords: tuple[RigorousReal, ...]

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def radius(self) -> float:
        return max(c.radius for c in self.coords)


FILTER_KINDS = ("all", "ap", "primes", "primes_ap")


@dataclass(frozen=True)
class RangeFilter:
    """Which integers of a range are kept: all, ``n = c mod q``, primes, or primes ``= c mod q``.

    ``clamp`` optionally intersects with ``[U, V)``.
    """

    kind: str = "all"
    c: int = 0
    q: int = 1
    clamp: tuple[int, int] | None = None

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise ValueError(f"unknown filter kind {self.kind!r}")
        if self.q < 1 or not 0 <= self.c < self.q:
            raise ValueError("need q >= 1 and 0 <= c < q")

    @classmethod
    def parse(cls, text: str) -> "RangeFilter":
        """``all``, ``ap:c,q``, ``primes`` or ``primes-ap:a,q``."""
        text = text.strip()
        name, _, arg = text.partition(":")
        name = name.replace("-", "_")
        if name in ("all", "primes"):
            return cls(name)
        if name in ("ap", "primes_ap"):
            c, q = (int(t) for t in arg.split(","))
            return cls(name, c % q, q)
        raise ValueError(f"cannot parse filter {text!r}")

    @classmethod
    def ap(cls, c: int, q: int) -> "RangeFilter":
        return cls("ap", c % q, q)

    @classmethod
    def primes_ap(cls, c: int, q: int) -> "RangeFilter":
        return cls("primes_ap", c % q, q)

    def with_clamp(self, U: int, V: int) -> "RangeFilter":
        return RangeFilter(self.kind, self.c, self.q, (U, V))

    def mask(self, lo: int, hi: int) -> np.ndarray:
        """Boolean selection over ``[lo, hi)``."""
        if self.clamp is not None:
            lo_c, hi_c = max(lo, self.clamp[0]), min(hi, self.clamp[1])
        else:
            lo_c, hi_c = lo, hi
        out = np.zeros(max(hi - lo, 0), dtype=bool)
        if hi_c <= lo_c:
            return out
        sub = np.ones(hi_c - lo_c, dtype=bool)
        if self.kind in ("primes", "primes_ap"):
            sub &= _primes.prime_mask(lo_c, hi_c)
        if self.kind in ("ap", "primes_ap"):
            sub &= (np.arange(lo_c, hi_c, dtype=np.int64) % self.q) == self.c
        out[lo_c - lo : hi_c - lo] = sub
        return out

    def select(self, lo: int, hi: int) -> np.ndarray:
        return lo + np.flatnonzero(self.mask(lo, hi)).astype(np.int64)

    def __str__(self) -> str:
        base = {"all": "all", "primes": "primes", "ap": f"ap:{self.c},{self.q}", "primes_ap": f"primes-ap:{self.c},{self.q}"}
        s = base[self.kind]
        return s if self.clamp is None else f"{s}@[{self.clamp[0]},{self.clamp[1]})"


# ---------------------------------------------------------------------------
# Membership


def frac_vector(
    F: RealExpPoly, shifts: Sequence[int], n: int, target_radius: float = DEFAULT_RADIUS
) -> FracVector:
    return FracVector(tuple(eval_frac(F, n + h, target_radius) for h in shifts))


def interval_verdict(x: RigorousReal, u: Fraction, v: Fraction) -> Verdict:
    """Is ``{x}`` in ``[u, v)``?  ``x`` is read modulo 1 (see :func:`frac_part`)."""
    if x.exact is not None:
        f = x.exact - math.floor(x.exact)
        return Verdict.IN if u <= f < v else Verdict.OUT
    if u == 0 and v == 1:
        return Verdict.IN
    ball = x.ball
    if ball >= 0 and ball < 1:
        if x.certainly_ge(u) and x.certainly_lt(v):
            return Verdict.IN
        if x.certainly_lt(u) or x.certainly_ge(v):
            return Verdict.OUT
        return Verdict.UNKNOWN
    # the ball straddles an integer: possible values hug both 0 and 1
    z = ball if ball.mid() < 0.5 else ball - 1
    hits_low = u == 0 or not z * u.denominator < u.numerator
    hits_high = not (z + 1) * v.denominator >= v.numerator
    if hits_low or hits_high:
        return Verdict.UNKNOWN
    return Verdict.OUT


def near_integer_verdict(x: RigorousReal, eps: Fraction) -> Verdict:
    """Is ``||x|| < eps`` (distance to the nearest integer)?"""
    if x.exact is not None:
        f = x.exact - math.floor(x.exact)
        return Verdict.IN if min(f, 1 - f) < eps else Verdict.OUT
    z = x.ball - int(x.ball.mid().floor().unique_fmpz())
    if z.mid() >= 0.5:
        z = z - 1
    e = to_arb(eps)
    if z > -e and z < e:
        return Verdict.IN
    if z >= e or z <= -e:
        return Verdict.OUT
    return Verdict.UNKNOWN


def box_membership(v: FracVector, box: SemiOpenBox) -> Verdict:
    if v.dim != box.dim:
        raise ValueError(f"dimension mismatch: vector {v.dim}, box {box.dim}")
    out = Verdict.IN
    for x, (u, w) in zip(v.coords, box.bounds):
        verdict = interval_verdict(x, u, w)
        if verdict == Verdict.OUT:
            return Verdict.OUT
        if verdict == Verdict.UNKNOWN:
            out = Verdict.UNKNOWN
    return out


def certified_interval_verdict(
    F: RealExpPoly, n: int, u: Fraction, v: Fraction, target_radius: float = DEFAULT_RADIUS, max_prec: int = MAX_PREC
) -> Verdict:
    """Interval verdict for ``{F(n)}``, tightening the enclosure while it stays Unknown."""
    for radius in (target_radius,) + tuple(r for r in ESCALATION if r < target_radius):
        try:
            x = eval_frac(F, n, radius, max_prec=max_prec)
        except PrecisionError:
            return Verdict.UNKNOWN
        verdict = interval_verdict(x, u, v)
        if verdict != Verdict.UNKNOWN:
            return verdict
    return Verdict.UNKNOWN


def certified_near_integer(
    F: RealExpPoly, n: int, eps: Fraction, target_radius: float = DEFAULT_RADIUS, max_prec: int = MAX_PREC
) -> Verdict:
    for radius in (target_radius,) + tuple(r for r in ESCALATION if r < target_radius):
        try:
            x = eval_frac(F, n, radius, max_prec=max_prec)
        except PrecisionError:
            return Verdict.UNKNOWN
        verdict = near_integer_verdict(x, eps)
        if verdict != Verdict.UNKNOWN:
            return verdict
    return Verdict.UNKNOWN


def interval_verdicts(
    F: RealExpPoly,
    ns: Sequence[int],
    u: Fraction,
    v: Fraction,
    target_radius: float = DEFAULT_RADIUS,
    max_prec: int = MAX_PREC,
) -> np.ndarray:
    """int8 verdicts for ``{F(n)} in [u, v)`` over many ``n``.

    One working precision serves the whole batch; points it cannot decide go
    through :func:`certified_interval_verdict`.
    """
    ns = [int(n) for n in ns]
    out = np.empty(len(ns), dtype=np.int8)
    if not ns:
        return out
    if u == 0 and v == 1:
        out[:] = Verdict.IN
        return out
    prec = start_precision(F, max(ns), target_radius, START_PREC)
    pending = []
    with working_precision(prec):
        # balls around the edges; comparing against them is conservative
        ua, va = to_arb(u), to_arb(v)
        for i, n in enumerate(ns):
            x = frac_part(eval_ball_raw(F, n))
            if x.exact is not None:
                out[i] = Verdict.IN if u <= x.exact < v else Verdict.OUT
                continue
            ball = x.ball
            if ball >= ua and ball < va:
                out[i] = Verdict.IN
            elif (ball < ua and ball >= 0) or (ball >= va and ball < 1):
                out[i] = Verdict.OUT
            else:
                pending.append(i)
    for i in pending:
        out[i] = certified_interval_verdict(F, ns[i], u, v, target_radius, max_prec)
    return out


def certified_membership(
    F: RealExpPoly,
    shifts: Sequence[int],
    n: int,
    box: SemiOpenBox,
    target_radius: float = DEFAULT_RADIUS,
    max_prec: int = MAX_PREC,
) -> Verdict:
    if len(shifts) != box.dim:
        raise ValueError("dimension mismatch between shifts and box")
    out = Verdict.IN
    for h, (u, v) in zip(shifts, box.bounds):
        verdict = certified_interval_verdict(F, n + h, u, v, target_radius, max_prec)
        if verdict == Verdict.OUT:
            return Verdict.OUT
        if verdict == Verdict.UNKNOWN:
            out = Verdict.UNKNOWN
    return out


BATCH = 1 << 16


class MembershipOracle:
    """Cached verdicts ``1_B(n)`` over a growing contiguous window of ``n``.

    Verdicts are stored as int8: 1 In, 0 Out, -1 Unknown.  Requests inside the
    cached window are served by slicing; others extend the window.
    """

    def __init__(self, F: RealExpPoly, shifts: Sequence[int], box: SemiOpenBox, target_radius: float = DEFAULT_RADIUS):
        if len(shifts) != box.dim:
            raise ValueError("dimension mismatch between shifts and box")
        self.F = F
        self.shifts = tuple(int(h) for h in shifts)
        self.box = box
        self.target_radius = target_radius
        self._lo = self._hi = 0
        self._data = np.empty(0, dtype=np.int8)

    def _compute(self, lo: int, hi: int) -> np.ndarray:
        out = np.ones(hi - lo, dtype=np.int8)
        for h, (u, v) in zip(self.shifts, self.box.bounds):
            if u == 0 and v == 1:
                continue
            idx = np.flatnonzero(out != Verdict.OUT)
            for start in range(0, len(idx), BATCH):
                chunk = idx[start : start + BATCH]
                got = interval_verdicts(self.F, (lo + h + chunk).tolist(), u, v, self.target_radius)
                out[chunk] = np.where(got == Verdict.IN, out[chunk], got)
        return out

    def verdicts(self, lo: int, hi: int) -> np.ndarray:
        if lo < 1:
            raise ValueError("n must be positive")
        if hi <= lo:
            return np.empty(0, dtype=np.int8)
        if not len(self._data):
            self._lo, self._hi, self._data = lo, hi, self._compute(lo, hi)
        else:
            if lo < self._lo:
                self._data = np.concatenate((self._compute(lo, self._lo), self._data))
                self._lo = lo
            if hi > self._hi:
                self._data = np.concatenate((self._data, self._compute(self._hi, hi)))
                self._hi = hi
        return self._data[lo - self._lo : hi - self._lo]


@lru_cache(maxsize=32)
def membership_oracle(
    F: RealExpPoly, shifts: tuple[int, ...], box: SemiOpenBox, target_radius: float = DEFAULT_RADIUS
) -> MembershipOracle:
    return MembershipOracle(F, shifts, box, target_radius)


def membership_array(
    F: RealExpPoly, shifts: Sequence[int], box: SemiOpenBox, lo: int, hi: int, target_radius: float = DEFAULT_RADIUS
) -> np.ndarray:
    """int8 verdicts for ``n`` in ``[lo, hi)`` (shared cache per ``(F, shifts, box, radius)``)."""
    return membership_oracle(F, tuple(int(h) for h in shifts), box, target_radius).verdicts(lo, hi)


# ---------------------------------------------------------------------------
# Discrepancy

DISCREPANCY_LIMITS = {1: 5000, 2: 200, 3: 30}


def _as_points(points) -> tuple[list[tuple], bool]:
    pts = [tuple(p) if isinstance(p, (tuple, list, np.ndarray)) else (p,) for p in points]
    exact = any(isinstance(c, (Fraction, int)) and not isinstance(c, bool) for p in pts for c in p)
    if exact:
        pts = [tuple(to_fraction(c) for c in p) for p in pts]
    else:
        pts = [tuple(float(c) for c in p) for p in pts]
    return pts, exact


def _sup_closed_1d(xs: list, frac, slope):
    """``max over [a, b] of count/N - slope*(b - a)`` with ``a <= b`` point coordinates."""
    if not xs:
        return None
    xs = sorted(xs)
    best = run_min = None
    below = 0
    for k, x in enumerate(xs):
        if k + 1 < len(xs) and xs[k + 1] == x:
            continue
        # x is the last copy of its value; ``below`` counts values < x
        left = frac(below) - slope * x
        run_min = left if run_min is None or left < run_min else run_min
        cand = frac(k + 1) - slope * x - run_min
        best = cand if best is None or cand > best else best
        below = k + 1
    return best


def _sup_open_1d(xs: list, frac, slope, zero, one):
    """``max of slope*(b - a) - count/N`` over the points strictly inside ``(a, b)``.

    ``a`` runs over 0 (an inclusive edge) and the coordinates (exclusive),
    ``b`` over the coordinates (exclusive) and 1.
    """
    xs = sorted(xs)
    best = zero
    run_min = zero  # min of slope*a - (#points <= a)/N; the inclusive edge at 0 counts nothing
    below = 0
    for k, x in enumerate(xs):
        if k + 1 < len(xs) and xs[k + 1] == x:
            continue
        cand = slope * x - frac(below) - run_min
        best = cand if cand > best else best
        left = slope * x - frac(k + 1)
        run_min = left if left < run_min else run_min
        below = k + 1
    cand = slope * one - frac(len(xs)) - run_min
    return cand if cand > best else best


def _intervals(values: list, closed: bool, zero, one) -> list[tuple]:
    """Candidate edges ``(a, b, a_inclusive)`` in one coordinate.

    Closed candidates contain both endpoints; open ones exclude ``b`` and
    exclude ``a`` unless it is the inclusive edge at 0.
    """
    coords = sorted(set(values))
    if closed:
        return [(a, b, True) for i, a in enumerate(coords) for b in coords[i:]]
    lefts = [(zero, True)] + [(a, False) for a in coords]
    rights = coords + [one]
    return [(a, b, inc) for a, inc in lefts for b in rights if a < b]


def _inside(p: float, a, b, a_inclusive: bool, closed: bool) -> bool:
    if closed:
        return a <= p <= b
    return (a <= p if a_inclusive else a < p) and p < b


def discrepancy_exact(points, limits: Mapping[int, int] | None = None):
    """Exact ``sup |#(P in B)/N - vol(B)|`` over boxes ``prod [a_i, b_i)`` with ``0 <= a_i < b_i < 1``.

    Accepts scalars (dimension 1) or tuples.  Fraction input gives a Fraction;
    float input a float.  The supremum is approached by boxes with edges at
    point coordinates or their one-sided limits, which is what is enumerated.
    """
    pts, exact = _as_points(points)
    N = len(pts)
    if N == 0:
        raise ValueError("need at least one point")
    ell = len(pts[0])
    if any(len(p) != ell for p in pts):
        raise ValueError("points must share a dimension")
    limits = dict(DISCREPANCY_LIMITS if limits is None else limits)
    if ell not in limits:
        raise ValueError(f"exact discrepancy supports dimensions {sorted(limits)}, got {ell}")
    if N > limits[ell]:
        raise ValueError(f"N = {N} exceeds the limit {limits[ell]} for dimension {ell}")
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    frac = (lambda c: Fraction(c, N)) if exact else (lambda c: c / N)
    for p in pts:
        if any(not zero <= c < one for c in p):
            raise ValueError("points must lie in [0, 1)")

    best = zero
    for closed in (True, False):
        per_dim = [_intervals([p[k] for p in pts], closed, zero, one) for k in range(ell - 1)]
        for edges in itertools.product(*per_dim):
            slope = one
            inside = pts
            for k, (a, b, inc) in enumerate(edges):
                slope = slope * (b - a)
                inside = [p for p in inside if _inside(p[k], a, b, inc, closed)]
            last = [p[-1] for p in inside]
            if closed:
                val = _sup_closed_1d(last, frac, slope)
            else:
                val = _sup_open_1d(last, frac, slope, zero, one)
            if val is not None and val > best:
                best = val
    return best


def r_weight(m: Sequence[int]) -> int:
    return math.prod(max(abs(x), 1) for x in m)


def frequencies(ell: int, H: int):
    """All ``m`` in ``Z^ell`` with ``0 < ||m||_inf <= H``, in lexicographic order."""
    for m in itertools.product(range(-H, H + 1), repeat=ell):
        if any(m):
            yield m


def etk_bracket(expsums: Mapping[tuple[int, ...], complex], N: int, H: int) -> float:
    """``1/(H+1) + sum_{0 < ||m|| <= H} |S_m / N| / r(m)``; no implied constant.

    A frequency missing from ``expsums`` is filled from its negative by
    conjugate symmetry; if both are missing that is an error.
    """
    if H < 1 or N < 1:
        raise ValueError("need H >= 1 and N >= 1")
    if not expsums:
        raise ValueError("no exponential sums given")
    ell = len(next(iter(expsums)))
    terms = []
    for m in frequencies(ell, H):
        if m in expsums:
            s = expsums[m]
        else:
            neg = tuple(-x for x in m)
            if neg not in expsums:
                raise KeyError(f"missing frequency {m}")
            s = expsums[neg]
        terms.append(abs(s) / N / r_weight(m))
    return 1.0 / (H + 1) + math.fsum(terms)


def point_spectrum(points, H: int) -> dict[tuple[int, ...], complex]:
    """``S_m = sum_n e(<m, x_n>)`` for explicit points, ``0 < ||m|| <= H``."""
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    out = {}
    for m in frequencies(X.shape[1], H):
        phase = X @ np.asarray(m, dtype=np.float64)
        out[m] = complex(np.exp(2j * np.pi * phase).sum())
    return out


# ---------------------------------------------------------------------------
# Exponential sums


@dataclass(frozen=True)
class ExpSum:
    value: complex
    radius: float
    count: int
    N: int

    def __abs__(self) -> float:
        return abs(self.value)


def _phase_ball(F, shifts, m, P, n, prec):
    with working_precision(prec):
        acc = arb(0)
        for mj, h in zip(m, shifts):
            if mj:
                acc += eval_ball(F, n + h, prec).ball * mj
        if P:
            acc += to_arb(sum((c * n**k for k, c in enumerate(P)), Fraction(0)))
        return frac_part(RigorousReal(acc))


def exp_sum(
    F: RealExpPoly,
    shifts: Sequence[int],
    m: Sequence[int],
    P: Sequence = (),
    filt: RangeFilter | None = None,
    N: int = 1,
    target_radius: float = DEFAULT_RADIUS,
    hi: int | None = None,
    max_prec: int = MAX_PREC,
) -> ExpSum:
    """Enclosure of ``sum e(<m, F(n + h)> + P(n))`` over filtered ``n`` in ``[N, 2N)``.

    ``P`` lists polynomial coefficients from the constant term up.  ``hi``
    overrides the range end ``2N``.  The returned radius bounds the distance
    from ``value`` to the true sum.
    """
    if len(m) != len(shifts):
        raise ValueError("m and shifts must have the same length")
    P = tuple(to_fraction(c) for c in P)
    if not any(m) and not any(P[1:]):
        raise ValueError("m = 0 with constant P is just the filtered count")
    filt = filt or RangeFilter()
    hi = 2 * N if hi is None else hi
    ns = filt.select(N, hi)
    if not len(ns):
        return ExpSum(0j, 0.0, 0, N)
    wsum = sum(abs(int(x)) for x in m) or 1
    top_shift = max(shifts) if shifts else 0
    below = max(0, -math.floor(math.log2(target_radius)))
    total_re = arb(0)
    total_im = arb(0)
    for n in ns.tolist():
        above = F.magnitude_bits(n + top_shift) + wsum.bit_length()
        if P:
            above = max(above, sum(abs(c) for c in P).__ceil__().bit_length() + n.bit_length() * (len(P) - 1))
        prec = 64
        while prec < above + below + 16:
            prec *= 2
        while True:
            if prec > max_prec:
                raise PrecisionError(f"phase at n = {n} not certified within {max_prec} bits")
            x = _phase_ball(F, shifts, m, P, n, prec)
            with working_precision(prec):
                s, c = (2 * x.ball).sin_cos_pi()
            if float(s.rad()) <= target_radius and float(c.rad()) <= target_radius:
                break
            prec *= 2
        with working_precision(prec):
            total_re += c
            total_im += s
    with working_precision(64):
        re_mid, im_mid = float(total_re.mid()), float(total_im.mid())
        # midpoint rounding to double is at most half an ulp per component
        rad = math.hypot(float(total_re.rad()), float(total_im.rad()))
        rad += math.ulp(abs(re_mid)) + math.ulp(abs(im_mid))
    return ExpSum(complex(re_mid, im_mid), rad, len(ns), N)


def decay_slope(series: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of ``log |S|`` against ``log N``."""
    if len(series) < 3:
        raise ValueError("need at least 3 points")
    Ns = np.array([float(a) for a, _ in series])
    mags = np.array([float(b) for _, b in series])
    if np.any(np.diff(Ns) <= 0):
        raise ValueError("N must be strictly increasing")
    if np.any(mags <= 0) or np.any(Ns <= 0):
        raise ValueError("N and magnitudes must be positive")
    slope, _ = np.polyfit(np.log(Ns), np.log(mags), 1)
    return float(slope)


@dataclass(frozen=True)
class PartialSumReport:
    sup: float
    bound: float
    ratio: float
    argmax: tuple[int, int]


def _diameter(points: np.ndarray) -> tuple[float, int, int]:
    from scipy.spatial import ConvexHull, QhullError

    if len(points) <= 1:
        return 0.0, 0, 0
    try:
        idx = ConvexHull(points).vertices
    except (QhullError, ValueError):
        # collinear: the extremes along the principal direction realize the diameter
        centered = points - points.mean(axis=0)
        direction = np.linalg.svd(centered, full_matrices=False)[2][0]
        proj = centered @ direction
        idx = np.array([int(np.argmin(proj)), int(np.argmax(proj))])
    hull = points[idx]
    d2 = ((hull[:, None, :] - hull[None, :, :]) ** 2).sum(axis=-1)
    i, j = np.unravel_index(int(np.argmax(d2)), d2.shape)
    return float(math.sqrt(d2[i, j])), int(idx[i]), int(idx[j])


def partial_sum_sup_check(values, C: float, alpha: float, W: float, N: int | None = None) -> PartialSumReport:
    """``sup_{U < V} |sum_{U <= n < V} values_n|`` via prefix sums, against ``C*N^alpha + W``.

    Real sequences use ``max - min`` of the prefix sums; complex ones the
    diameter of the prefix-sum point set.  ``argmax`` gives the offsets
    ``(U, V)`` of one maximizing block relative to the first value.
    """
    vals = np.asarray(values)
    N = len(vals) if N is None else N
    prefix = np.concatenate(([0], np.cumsum(vals)))
    if np.iscomplexobj(prefix):
        pts = np.column_stack((prefix.real, prefix.imag))
        sup, i, j = _diameter(pts)
    else:
        prefix = prefix.astype(np.float64)
        i, j = int(np.argmin(prefix)), int(np.argmax(prefix))
        sup = float(prefix[j] - prefix[i])
    U, V = sorted((i, j))
    bound = C * float(N) ** alpha + W
    return PartialSumReport(sup, bound, sup / bound if bound > 0 else math.inf, (U, V))


def e(x: float) -> complex:
    return cmath.exp(2j * math.pi * x)
