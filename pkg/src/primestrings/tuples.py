"""Admissible shift tuples with integer relations between the shifted values."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from flint import arb, fmpq_mat

from primestrings.equidist import (
    SemiOpenBox,
    Verdict,
    certified_near_integer,
    membership_array,
)
from primestrings.primes import primorial, small_primes
from primestrings.realexp import (
    DEFAULT_RADIUS,
    MAX_PREC,
    START_PREC,
    PrecisionError,
    RealExpPoly,
    RigorousReal,
    eval_ball,
    to_fraction,
    working_precision,
)

MAX_D = 30


@dataclass(frozen=True)
class ShiftedTuple:
    """Shifts ``h_1 < ... < h_d``; the last ``d - ell`` are integer combinations of the first ``ell``.

    ``B[s - ell - 1][j - 1]`` is ``b_{s,j}`` (1-based ``s`` in ``(ell, d]``).
    """

    ell: int
    d: int
    h: tuple[int, ...]
    B: tuple[tuple[int, ...], ...]
    q_scale: int

    def __post_init__(self):
        if len(self.h) != self.d:
            raise ValueError("h must have d entries")
        if len(self.B) != self.d - self.ell or any(len(row) != self.ell for row in self.B):
            raise ValueError("B must be (d - ell) x ell")

    def row(self, s: int) -> tuple[int, ...]:
        if not self.ell < s <= self.d:
            raise ValueError(f"s must lie in ({self.ell}, {self.d}]")
        return self.B[s - self.ell - 1]

    @property
    def leading(self) -> tuple[int, ...]:
        return self.h[: self.ell]

    @property
    def max_b(self) -> int:
        return max((abs(b) for row in self.B for b in row), default=0)

    @property
    def diameter(self) -> int:
        return self.h[-1] - self.h[0]

    def moment_identities_hold(self) -> bool:
        return all(
            sum(b * hj**n for b, hj in zip(self.row(s), self.leading)) == self.h[s - 1] ** n
            for s in range(self.ell + 1, self.d + 1)
            for n in range(self.ell)
        )

    def to_dict(self) -> dict:
        return {"ell": self.ell, "d": self.d, "h": list(self.h), "B": [list(r) for r in self.B], "q_scale": self.q_scale}

    @classmethod
    def from_dict(cls, data: dict) -> "ShiftedTuple":
        return cls(
            int(data["ell"]),
            int(data["d"]),
            tuple(int(x) for x in data["h"]),
            tuple(tuple(int(b) for b in row) for row in data["B"]),
            int(data["q_scale"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ShiftedTuple":
        return cls.from_dict(json.loads(text))


def basis_coefficients(h: Sequence[int]) -> list[list[Fraction]]:
    """``C[k][j]`` with ``e_k = sum_j C[k][j] * nu(h_j)``, where ``nu(x) = (1, x, ..., x^{ell-1})``."""
    ell = len(h)
    V = fmpq_mat([[hj**n for hj in h] for n in range(ell)])
    Vinv = V.inv()
    # nu(h_j) is column j of V, so e_k is column k of V^{-1} read as weights on those columns
    return [[Fraction(int(Vinv[j, k].p), int(Vinv[j, k].q)) for j in range(ell)] for k in range(ell)]


def build_admissible(ell: int, d: int, max_d: int = MAX_D) -> ShiftedTuple:
    """The explicit tuple: ``h_j = (j-1) P`` for ``j <= ell``, ``h_s = q s P`` beyond, with ``P`` the primorial of ``d``."""
    if ell < 1:
        raise ValueError("ell must be positive")
    if d < ell:
        raise ValueError("need d >= ell")
    if d > max_d:
        raise ValueError(f"d = {d} exceeds the configured maximum {max_d}")
    P = primorial(d)
    lead = [(j - 1) * P for j in range(1, ell + 1)]
    C = basis_coefficients(lead)
    q = math.prod(c.denominator for row in C for c in row)
    extra = [q * s * P for s in range(ell + 1, d + 1)]
    B = []
    for hs in extra:
        row = [sum((hs**k * C[k][j] for k in range(ell)), Fraction(0)) for j in range(ell)]
        if any(b.denominator != 1 for b in row):
            raise ArithmeticError("relation coefficients are not integral")
        B.append(tuple(int(b) for b in row))
    return ShiftedTuple(ell, d, tuple(lead + extra), tuple(B), q)


@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    witnesses: dict[int, int] = field(default_factory=dict)
    covering_prime: int | None = None

    def __bool__(self) -> bool:
        return self.admissible


def check_admissible(h: Iterable[int]) -> Admissibility:
    """Residue-cover test for every prime ``p <= |h|``.

    On success ``witnesses[p]`` is the least ``n`` with ``n + h_j`` prime to
    ``p`` for all ``j``.
    """
    hs = list(h)
    if not hs:
        raise ValueError("h must be nonempty")
    if len(set(hs)) != len(hs):
        raise ValueError("shifts must be distinct")
    witnesses = {}
    for p in small_primes(len(hs)).tolist():
        forbidden = {(-x) % p for x in hs}
        free = [n for n in range(p) if n not in forbidden]
        if not free:
            return Admissibility(False, {}, p)
        witnesses[p] = free[0]
    return Admissibility(True, witnesses)


def relation_residual(
    F: RealExpPoly,
    t: ShiftedTuple,
    s: int,
    x: int,
    target_radius: float = DEFAULT_RADIUS,
    max_prec: int = MAX_PREC,
) -> RigorousReal:
    """Enclosure of ``F(x + h_s) - sum_j b_{s,j} F(x + h_j)``."""
    if x < 1:
        raise ValueError("x must be positive")
    row = t.row(s)
    above = F.magnitude_bits(x + t.h[s - 1]) + max(1, max(abs(b) for b in row)).bit_length() + t.ell.bit_length()
    below = max(0, -math.floor(math.log2(target_radius)))
    prec = START_PREC
    while prec < above + below + 8:
        prec *= 2
    while prec <= max_prec:
        with working_precision(prec):
            acc = eval_ball(F, x + t.h[s - 1], prec).ball
            for b, hj in zip(row, t.leading):
                acc -= eval_ball(F, x + hj, prec).ball * b
        out = RigorousReal(acc)
        if out.radius <= target_radius:
            return out
        prec *= 2
    raise PrecisionError(f"residual at x = {x} not certified within {max_prec} bits")


def shrink_delta(t: ShiftedTuple, eps) -> Fraction:
    """``eps / (2 ell max|b|)``; ``eps`` itself when there are no extra shifts."""
    eps = to_fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if t.d == t.ell:
        return eps
    return eps / (2 * t.ell * t.max_b)


@dataclass(frozen=True)
class InclusionReport:
    lo: int
    hi: int
    eps: Fraction
    delta: Fraction
    hits: int
    violations: tuple[int, ...]
    unknown_box: int
    unknown_check: tuple[int, ...]
    n0: int

    @property
    def ok(self) -> bool:
        return not self.violations


def inclusion_check(
    F: RealExpPoly,
    t: ShiftedTuple,
    eps,
    lo: int,
    hi: int,
    target_radius: float = DEFAULT_RADIUS,
) -> InclusionReport:
    """Scan ``[lo, hi)``: wherever ``{F(n + h_j)} in [0, Delta)`` for ``j <= ell``, test ``||F(n + h_j)|| < eps`` for all ``j``.

    ``n0`` is one past the largest violation (``lo`` if there is none).
    Undecidable points are reported, not dropped.
    """
    eps = to_fraction(eps)
    delta = shrink_delta(t, eps)
    box = SemiOpenBox.cube(0, delta, t.ell)
    verdicts = membership_array(F, t.leading, box, lo, hi, target_radius)
    hits = np.flatnonzero(verdicts == Verdict.IN)
    violations, unknown = [], []
    for idx in hits.tolist():
        n = lo + idx
        for hj in t.h:
            v = certified_near_integer(F, n + hj, eps, target_radius)
            if v == Verdict.OUT:
                violations.append(n)
                break
            if v == Verdict.UNKNOWN:
                unknown.append(n)
                break
    n0 = violations[-1] + 1 if violations else lo
    return InclusionReport(
        lo, hi, eps, delta, len(hits), tuple(violations), int(np.count_nonzero(verdicts == Verdict.UNKNOWN)), tuple(unknown), n0
    )
