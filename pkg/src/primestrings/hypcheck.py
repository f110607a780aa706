"""Empirical checks of the four sieve hypotheses for B-sets, and the classical BV sum.

Throughout, ``B = {n : ({F(n + h_1)}, ..., {F(n + h_ell)}) in box}`` and
counts run over ``n`` in ``[N, 2N)``.  Hypotheses are specialized to linear
forms ``n + h_i`` (unit leading coefficients).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import gmpy2
import numpy as np

from primestrings.equidist import RangeFilter, SemiOpenBox, Verdict, decay_slope, membership_array
from primestrings.primes import euler_phi, prime_mask, primes_in
from primestrings.realexp import DEFAULT_RADIUS, RealExpPoly
from primestrings.tuples import ShiftedTuple

THETA_H2 = 0.2
THETA_H3 = 0.15
THETA_H4 = 0.2
THETA_BV = 0.3
DELTA = 0.98
# the side condition on the number of forms is recorded, not enforced
K_NOTE = "side condition k <= (log N)^(1/5) not enforced"


@dataclass
class HypReport:
    hypothesis: str
    N: int
    param: float
    lhs: float
    normalizer: float
    ratio: float
    worst: list[tuple[int, int, float]] = field(default_factory=list)
    unknown: int = 0
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.worst.sort(key=lambda w: (-w[2], w[0], w[1]))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["worst"] = [list(w) for w in self.worst]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "HypReport":
        data = dict(data)
        data["worst"] = [tuple(w) for w in data.get("worst", [])]
        return cls(**data)


def q_limit(N: int, theta: float, strict: bool = False) -> int:
    """Largest ``q`` with ``q <= N^theta`` (``q < N^theta`` when ``strict``), at least 1."""
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    t = theta * math.log(N)
    q = int(math.exp(t)) + 1
    while q > 1 and (math.log(q) > t + 1e-12 or (strict and math.log(q) >= t - 1e-12)):
        q -= 1
    return q


def _shifts(t) -> tuple[int, ...]:
    return tuple(t.leading) if isinstance(t, ShiftedTuple) else tuple(int(h) for h in t)


def _all_shifts(t) -> tuple[int, ...]:
    return tuple(t.h) if isinstance(t, ShiftedTuple) else tuple(int(h) for h in t)


def b_verdicts(F: RealExpPoly, t, box: SemiOpenBox, N: int, target_radius: float = DEFAULT_RADIUS, hi: int | None = None):
    return membership_array(F, _shifts(t), box, N, 2 * N if hi is None else hi, target_radius)


def count_B(
    F: RealExpPoly,
    t,
    box: SemiOpenBox,
    filt: RangeFilter | None = None,
    N: int = 1,
    target_radius: float = DEFAULT_RADIUS,
    hi: int | None = None,
) -> tuple[int, int]:
    """``(certified In count, Unknown count)`` over filtered ``n`` in ``[N, 2N)``."""
    hi = 2 * N if hi is None else hi
    if hi <= N:
        return 0, 0
    if box.dim != len(_shifts(t)):
        raise ValueError("box dimension must equal the number of leading shifts")
    verdicts = b_verdicts(F, t, box, N, target_radius, hi)
    sel = (filt or RangeFilter()).mask(N, hi)
    return int(np.count_nonzero(sel & (verdicts == Verdict.IN))), int(np.count_nonzero(sel & (verdicts == Verdict.UNKNOWN)))


def _in_positions(F, t, box, N, target_radius):
    verdicts = b_verdicts(F, t, box, N, target_radius)
    ns = N + np.flatnonzero(verdicts == Verdict.IN).astype(np.int64)
    return ns, int(np.count_nonzero(verdicts == Verdict.UNKNOWN))


def h1_ratio(F: RealExpPoly, t, box: SemiOpenBox, N: int, target_radius: float = DEFAULT_RADIUS) -> HypReport:
    """``(1/d) sum_i #{n in B : n + h_i prime}`` against ``#B / log N``."""
    ns, unknown = _in_positions(F, t, box, N, target_radius)
    if not len(ns):
        raise ValueError("B is empty on [N, 2N): the density ratio is undefined")
    hs = _all_shifts(t)
    hits = 0
    for h in hs:
        mask = prime_mask(N + h, 2 * N + h)
        hits += int(np.count_nonzero(mask[ns - N]))
    lhs = hits / len(hs)
    normalizer = len(ns) / math.log(N)
    ratio = lhs / normalizer
    notes = [f"delta threshold {DELTA}: {'met' if ratio >= DELTA else 'not met'}"]
    return HypReport("H1", N, DELTA, lhs, normalizer, ratio, [], unknown, notes)


def _residue_counts(ns: np.ndarray, q: int) -> np.ndarray:
    return np.bincount(ns % q, minlength=q)


def h2_bv_sum(
    F: RealExpPoly, t, box: SemiOpenBox, N: int, theta: float = THETA_H2, target_radius: float = DEFAULT_RADIUS
) -> HypReport:
    """``sum_{q <= N^theta} max_c |#(B, n = c mod q) - #B/q|``, normalized by ``#B``."""
    ns, unknown = _in_positions(F, t, box, N, target_radius)
    total = len(ns)
    lhs = Fraction(0)
    worst = []
    for q in range(1, q_limit(N, theta) + 1):
        counts = _residue_counts(ns, q)
        dev = np.abs(counts * q - total)
        c = int(np.argmax(dev))
        d = Fraction(int(dev[c]), q)
        lhs += d
        worst.append((q, c, float(d)))
    normalizer = float(total) if total else 1.0
    return HypReport("H2", N, theta, float(lhs), normalizer, float(lhs) / normalizer, worst, unknown, [K_NOTE])


def h2_decay(
    F: RealExpPoly, t, box: SemiOpenBox, Ns: Sequence[int], theta: float = THETA_H2, target_radius: float = DEFAULT_RADIUS
) -> tuple[list[HypReport], float]:
    """H2 reports at several ``N`` and the fitted ``beta`` in ``lhs/#B ~ N^-beta``."""
    reports = [h2_bv_sum(F, t, box, N, theta, target_radius) for N in Ns]
    series = [(r.N, r.ratio) for r in reports if r.ratio > 0]
    beta = -decay_slope(series) if len(series) >= 3 else math.nan
    return reports, beta


def h3_prime_bv_sum(
    F: RealExpPoly,
    t,
    box: SemiOpenBox,
    h: int = 0,
    N: int = 1,
    theta: float = THETA_H3,
    target_radius: float = DEFAULT_RADIUS,
) -> HypReport:
    """``sum_{q < N^theta} max_{(c + h, q) = 1} |#(n in B, n + h prime, n = c mod q) - #(...)/phi(q)|``."""
    ns, unknown = _in_positions(F, t, box, N, target_radius)
    mask = prime_mask(N + h, 2 * N + h)
    ns = ns[mask[ns - N]] if len(ns) else ns
    total = len(ns)
    lhs = Fraction(0)
    worst = []
    for q in range(1, q_limit(N, theta, strict=True) + 1):
        counts = _residue_counts(ns, q)
        phi = euler_phi(q)
        best = (Fraction(-1), 0)
        for c in range(q):
            if math.gcd(c + h, q) != 1:
                continue
            dev = Fraction(abs(int(counts[c]) * phi - total), phi)
            if dev > best[0]:
                best = (dev, c)
        lhs += best[0]
        worst.append((q, best[1], float(best[0])))
    normalizer = float(total) if total else 1.0
    notes = [K_NOTE, "residues restricted by gcd(c + h, q) = 1"]
    return HypReport("H3", N, theta, float(lhs), normalizer, float(lhs) / normalizer, worst, unknown, notes)


def h4_concentration(
    F: RealExpPoly, t, box: SemiOpenBox, N: int, theta: float = THETA_H4, target_radius: float = DEFAULT_RADIUS
) -> HypReport:
    """``max_{q <= N^theta, c} q * #(B, n = c mod q) / #B``."""
    ns, unknown = _in_positions(F, t, box, N, target_radius)
    total = len(ns)
    if not total:
        raise ValueError("B is empty on [N, 2N): concentration is undefined")
    best = (0.0, 1, 0)
    worst = []
    for q in range(1, q_limit(N, theta) + 1):
        counts = _residue_counts(ns, q)
        c = int(np.argmax(counts))
        r = q * int(counts[c]) / total
        worst.append((q, c, r))
        if r > best[0]:
            best = (r, q, c)
    notes = [K_NOTE, f"maximizer q={best[1]} c={best[2]}"]
    return HypReport("H4", N, theta, best[0], 1.0, best[0], worst, unknown, notes)


def classic_bv_sum(N: int, theta: float = THETA_BV, mode: str = "pi", D: float = 2.0) -> HypReport:
    """``sum_{q <= N^theta} max_{(a, q) = 1} |pi(N; a, q) - pi(N)/phi(q)|`` (or with ``psi``).

    The ratio is taken against ``N / (log N)^D``.
    """
    if not 0 < theta < 0.5:
        raise ValueError("theta must lie in (0, 1/2)")
    if mode not in ("pi", "psi"):
        raise ValueError("mode is 'pi' or 'psi'")
    ps = primes_in(2, N + 1).primes if N >= 2 else np.empty(0, dtype=np.int64)
    if mode == "pi":
        values, weights = ps, None
    else:
        vals, wts = [], []
        k = 1
        while 2**k <= N:
            sub = ps[ps <= int(gmpy2.iroot(N, k)[0])]
            vals.append(sub**k)
            wts.append(np.log(sub.astype(np.float64)))
            k += 1
        values = np.concatenate(vals)
        weights = np.concatenate(wts)
    total = len(values) if weights is None else math.fsum(weights.tolist())
    lhs_terms = []
    worst = []
    for q in range(1, q_limit(N, theta) + 1):
        buckets = np.bincount(values % q, weights=weights, minlength=q)
        phi = euler_phi(q)
        best = (-1.0, 0)
        for a in range(q):
            if math.gcd(a, q) != 1:
                continue
            if weights is None:
                dev = float(Fraction(abs(int(buckets[a]) * phi - total), phi))
            else:
                dev = abs(float(buckets[a]) - total / phi)
            if dev > best[0]:
                best = (dev, a)
        lhs_terms.append(best[0])
        worst.append((q, best[1], best[0]))
    lhs = math.fsum(lhs_terms)
    normalizer = N / math.log(N) ** D
    return HypReport("BV", N, theta, lhs, normalizer, lhs / normalizer, worst, 0, [f"mode={mode}", f"D={D}"])


def default_hyp_N(lo: int, hi: int, cap: int = 1 << 18) -> int | None:
    """Largest power of two ``N <= cap`` with ``[N, 2N)`` inside ``[lo, hi)``."""
    N = 1
    best = None
    while 2 * N <= hi and N <= cap:
        if N >= lo:
            best = N
        N *= 2
    return best

