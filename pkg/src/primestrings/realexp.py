"""Polynomials with real exponents and rigorous evaluation of their fractional parts.

A polynomial with real exponents is ``F(x) = sum_i d_i * x**rho_i`` with
``0 <= rho_1 < ... < rho_r`` and ``d_r != 0``.  Coefficients and exponents are
held as exact :class:`fractions.Fraction` values; decimal strings such as
``"1.5"`` mean exactly ``3/2``.

Values ``F(n)`` are enclosed in Arb balls (python-flint).  Terms whose value is
an exact rational (integer exponents, perfect powers) stay exact, so points
such as ``{sqrt(4)} = 0`` are certified without escalation.
"""

from __future__ import annotations

import math
import re
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import gmpy2
from flint import arb, ctx, fmpq

START_PREC = 64
MAX_PREC = 4096
DEFAULT_RADIUS = 2.0**-40


class PrecisionError(ArithmeticError):
    """Raised when a certified result needs more than the precision ceiling."""


def to_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float.

    Floats go through ``repr`` so that ``0.1`` means the decimal ``1/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to Fraction")


def to_arb(q: Fraction | int) -> arb:
    if isinstance(q, int):
        return arb(q)
    if q.denominator == 1:
        return arb(q.numerator)
    return arb(fmpq(q.numerator, q.denominator))


@contextmanager
def working_precision(prec: int):
    # flint's context is process-global; callers must not interleave precisions across threads
    with ctx.workprec(prec):
        yield


def _radius_upper(ball: arb) -> float:
    r = float(ball.rad())
    return math.nextafter(math.nextafter(r, math.inf), math.inf) if r else 0.0


# ---------------------------------------------------------------------------
# Rigorous reals


@dataclass(frozen=True)
class RigorousReal:
    """Midpoint-radius enclosure of a real number.

    ``exact`` is set when the value is known as an exact rational; the ball is
    then a (possibly rounded) enclosure of it and all comparisons use the
    rational.
    """

    ball: arb
    exact: Fraction | None = None

    @classmethod
    def from_value(cls, value, prec: int = START_PREC) -> "RigorousReal":
        q = to_fraction(value)
        with working_precision(prec):
            return cls(to_arb(q), q)

    @property
    def midpoint(self) -> arb:
        if self.exact is not None:
            return to_arb(self.exact)
        return self.ball.mid()

    @property
    def radius(self) -> float:
        if self.exact is not None:
            return 0.0
        return _radius_upper(self.ball)

    def __float__(self) -> float:
        if self.exact is not None:
            return float(self.exact)
        return float(self.ball.mid())

    def contains(self, value) -> bool:
        q = to_fraction(value)
        if self.exact is not None:
            return self.exact == q
        return bool(self.ball.contains(to_arb(q)))

    def overlaps(self, other: "RigorousReal") -> bool:
        if self.exact is not None and other.exact is not None:
            return self.exact == other.exact
        if self.exact is not None:
            return other.contains(self.exact)
        if other.exact is not None:
            return self.contains(other.exact)
        return bool(self.ball.overlaps(other.ball))

    def certainly_ge(self, q: Fraction) -> bool:
        if self.exact is not None:
            return self.exact >= q
        return bool(self.ball * q.denominator >= q.numerator)

    def certainly_lt(self, q: Fraction) -> bool:
        if self.exact is not None:
            return self.exact < q
        return bool(self.ball * q.denominator < q.numerator)

    def certainly_gt(self, q: Fraction) -> bool:
        if self.exact is not None:
            return self.exact > q
        return bool(self.ball * q.denominator > q.numerator)

    def certainly_le(self, q: Fraction) -> bool:
        if self.exact is not None:
            return self.exact <= q
        return bool(self.ball * q.denominator <= q.numerator)

    def _combine(self, other, op) -> "RigorousReal":
        if not isinstance(other, RigorousReal):
            other = RigorousReal.from_value(other)
        exact = None
        if self.exact is not None and other.exact is not None:
            exact = op(self.exact, other.exact)
        return RigorousReal(op(self.ball, other.ball), exact)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __mul__(self, other):
        return self._combine(other, lambda a, b: a * b)

    def __neg__(self):
        return RigorousReal(-self.ball, None if self.exact is None else -self.exact)

    def __repr__(self) -> str:
        if self.exact is not None:
            return f"RigorousReal(exact={self.exact})"
        return f"RigorousReal({self.ball.str(20, radius=True)})"


def frac_part(x: RigorousReal) -> RigorousReal:
    """Enclosure of ``{x}`` whose midpoint lies in ``[0, 1)``.

    The ball is read modulo 1: when ``x`` sits within its radius of an integer
    the enclosure may poke below 0, meaning values just under 1 are possible.
    """
    if x.exact is not None:
        f = x.exact - math.floor(x.exact)
        return RigorousReal(to_arb(f), f)
    k = int(x.ball.mid().floor().unique_fmpz())
    y = x.ball - k
    if y.mid() >= 1:
        y = y - 1
    return RigorousReal(y)


# ---------------------------------------------------------------------------
# Polynomials with real exponents


@dataclass(frozen=True)
class RealExpPoly:
    """``F(x) = sum d_i x^rho_i`` with exact rational coefficients and exponents."""

    terms: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("polynomial needs at least one term")
        norm = tuple((to_fraction(d), to_fraction(rho)) for d, rho in self.terms)
        object.__setattr__(self, "terms", norm)
        exps = [rho for _, rho in norm]
        if any(rho < 0 for rho in exps):
            raise ValueError("exponents must be nonnegative")
        if any(b <= a for a, b in zip(exps, exps[1:])):
            raise ValueError("exponents must be strictly increasing")
        if norm[-1][0] == 0:
            raise ValueError("leading coefficient must be nonzero")

    @classmethod
    def from_terms(cls, terms: Iterable[tuple]) -> "RealExpPoly":
        pairs = sorted(((to_fraction(d), to_fraction(r)) for d, r in terms), key=lambda t: t[1])
        return cls(tuple(pairs))

    @classmethod
    def parse(cls, text: str) -> "RealExpPoly":
        return parse_poly(text)

    @property
    def r(self) -> int:
        return len(self.terms)

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return tuple(d for d, _ in self.terms)

    @property
    def exponents(self) -> tuple[Fraction, ...]:
        return tuple(rho for _, rho in self.terms)

    @property
    def leading_exponent(self) -> Fraction:
        return self.terms[-1][1]

    @property
    def leading_coefficient(self) -> Fraction:
        return self.terms[-1][0]

    @property
    def ell(self) -> int:
        return math.floor(self.leading_exponent) + 1

    @property
    def theorem_eligible(self) -> bool:
        return self.leading_exponent.denominator != 1

    @property
    def frac_leading_exponent(self) -> Fraction:
        rho = self.leading_exponent
        return rho - math.floor(rho)

    def shifted(self, c) -> "RealExpPoly":
        """``F + c`` as a new polynomial (``c`` merges into the exponent-0 term)."""
        c = to_fraction(c)
        if c == 0:
            return self
        terms = dict((rho, d) for d, rho in self.terms)
        terms[Fraction(0)] = terms.get(Fraction(0), Fraction(0)) + c
        pairs = [(d, rho) for rho, d in terms.items() if d != 0 or rho == self.leading_exponent]
        return RealExpPoly.from_terms(pairs)

    @cached_property
    def compiled(self) -> tuple:
        """Per-term ``(coefficient as fmpq, coefficient == 1, p, q)`` with ``rho = p/q``."""
        return tuple(
            (fmpq(d.numerator, d.denominator), d == 1, rho.numerator, rho.denominator) for d, rho in self.terms
        )

    @cached_property
    def _magnitude_terms(self) -> tuple:
        extra = self.r.bit_length() + 1
        return tuple(
            (abs(d.numerator).bit_length() - abs(d.denominator).bit_length() + extra, rho.numerator, rho.denominator)
            for d, rho in self.terms
        )

    def magnitude_bits(self, n: int) -> int:
        """Upper bound on ``log2 |F(n)|`` (at least 0), cheap enough to call per point."""
        nbits = max(n, 1).bit_length()
        return max(0, max(c - (-p * nbits // q) for c, p, q in self._magnitude_terms))

    def __call__(self, x: float) -> float:
        return sum(float(d) * float(x) ** float(rho) for d, rho in self.terms)

    def __str__(self) -> str:
        return format_poly(self)


_TERM_RE = re.compile(
    r"""^(?P<coef>(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(/\d+)?)?\s*\*?\s*
        (?P<x>x\s*(\^\s*(\{\s*(?P<e1>[^}]+)\}|\((?P<e2>[^)]+)\)|(?P<e3>[0-9.eE/+-]+)))?)?$""",
    re.VERBOSE,
)


def parse_poly(text: str) -> RealExpPoly:
    """Parse ``"d1*x^r1 + d2*x^r2 + ..."`` with decimal coefficients and exponents.

    ``x`` alone is ``x^1``, a bare number is a constant, and a missing
    coefficient is 1.  Exponents may be wrapped in braces or parentheses.
    """
    src = text.replace(" ", "")
    if not src:
        raise ValueError("empty polynomial")
    # split on +/- that are not part of an exponent or scientific notation
    pieces: list[tuple[int, str]] = []
    sign, start, depth = 1, 0, 0
    if src[0] in "+-":
        sign = -1 if src[0] == "-" else 1
        start = 1
    i = start
    while i < len(src):
        ch = src[i]
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        elif ch in "+-" and depth == 0 and src[i - 1] not in "eE^":
            pieces.append((sign, src[start:i]))
            sign = -1 if ch == "-" else 1
            start = i + 1
        i += 1
    pieces.append((sign, src[start:]))

    terms: dict[Fraction, Fraction] = {}
    for sgn, body in pieces:
        m = _TERM_RE.match(body)
        if not body or m is None or (m.group("coef") is None and m.group("x") is None):
            raise ValueError(f"cannot parse term {body!r} in {text!r}")
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("x") is None:
            exp = Fraction(0)
        else:
            raw = m.group("e1") or m.group("e2") or m.group("e3")
            exp = Fraction(raw) if raw else Fraction(1)
        if exp in terms:
            raise ValueError(f"repeated exponent {exp} in {text!r}")
        terms[exp] = sgn * coef
    return RealExpPoly.from_terms((d, rho) for rho, d in terms.items())


def _fmt_q(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    # terminating decimals print as decimals, everything else as p/q
    den = q.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    if den == 1:
        s = f"{q.numerator / q.denominator!r}"
        if Fraction(s) == q:
            return s
    return f"{q.numerator}/{q.denominator}"


def format_poly(poly: RealExpPoly) -> str:
    parts = []
    for d, rho in reversed(poly.terms):
        if rho == 0:
            body = _fmt_q(abs(d))
        else:
            power = "x" if rho == 1 else f"x^{_fmt_q(rho)}"
            body = power if abs(d) == 1 else f"{_fmt_q(abs(d))}*{power}"
        parts.append(("-" if d < 0 else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for s, body in parts[1:]:
        out += f" {s} {body}"
    return out


# ---------------------------------------------------------------------------
# Evaluation


def _term_value(n: int, rho: Fraction):
    """Exact integer value of ``n**rho`` when there is one, else ``None``."""
    p, q = rho.numerator, rho.denominator
    if q == 1:
        return n**p
    root, exact = gmpy2.iroot(n, q)
    if exact:
        return int(root) ** p
    return None


def exact_value(poly: RealExpPoly, n: int) -> Fraction | None:
    """``F(n)`` as an exact rational when every term is rational at ``n``, else ``None``."""
    total = Fraction(0)
    for d, rho in poly.terms:
        v = _term_value(n, rho)
        if v is None:
            return None
        total += d * v
    return total


def eval_ball_raw(poly: RealExpPoly, n: int) -> RigorousReal:
    """Enclosure of ``F(n)`` at the current working precision."""
    exact_part = fmpq(0)
    ball = None
    for d, unit, p, q in poly.compiled:
        if q == 1:
            exact_part += d * n**p
            continue
        root, is_exact = gmpy2.iroot(n, q)
        if is_exact:
            exact_part += d * int(root) ** p
            continue
        t = arb(n).root(q)
        if p != 1:
            t = t**p
        if not unit:
            t = t * d
        ball = t if ball is None else ball + t
    if ball is None:
        return RigorousReal(arb(exact_part), Fraction(int(exact_part.p), int(exact_part.q)))
    if exact_part != 0:
        ball = ball + exact_part
    return RigorousReal(ball)


def eval_ball(poly: RealExpPoly, n: int, prec: int) -> RigorousReal:
    """Enclosure of ``F(n)`` at working precision ``prec`` (``n >= 0`` integer)."""
    with working_precision(prec):
        return eval_ball_raw(poly, n)


def start_precision(poly: RealExpPoly, n: int, target_radius: float, floor_prec: int) -> int:
    # bits above the binary point plus bits wanted below it, with slack for rounding
    below = max(0, -math.floor(math.log2(target_radius)))
    above = poly.magnitude_bits(n)
    prec = floor_prec
    while prec < above + below + 12:
        prec *= 2
    return prec


def _prec_ladder(start: int, ceiling: int):
    prec = start
    while prec <= ceiling:
        yield prec
        prec *= 2


def eval_frac(
    poly: RealExpPoly,
    n: int,
    target_radius: float = DEFAULT_RADIUS,
    *,
    start_prec: int = START_PREC,
    max_prec: int = MAX_PREC,
) -> RigorousReal:
    """Certified enclosure of ``{F(n)}`` with radius at most ``target_radius``.

    Precision doubles from ``start_prec`` until the radius target is met;
    :class:`PrecisionError` is raised past ``max_prec``.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not target_radius > 0:
        raise ValueError("target_radius must be positive")
    for prec in _prec_ladder(start_precision(poly, n, target_radius, start_prec), max_prec):
        with working_precision(prec):
            x = frac_part(eval_ball(poly, n, prec))
        if x.radius <= target_radius:
            return x
    raise PrecisionError(f"{{F({n})}} not certified to radius {target_radius} within {max_prec} bits")


def eval_value(
    poly: RealExpPoly,
    n: int,
    target_radius: float = DEFAULT_RADIUS,
    *,
    start_prec: int = START_PREC,
    max_prec: int = MAX_PREC,
) -> RigorousReal:
    """Certified enclosure of ``F(n)`` itself (no reduction mod 1)."""
    for prec in _prec_ladder(start_precision(poly, n, target_radius, start_prec), max_prec):
        x = eval_ball(poly, n, prec)
        if x.radius <= target_radius:
            return x
    raise PrecisionError(f"F({n}) not certified to radius {target_radius} within {max_prec} bits")


# ---------------------------------------------------------------------------
# Symbol-level machinery


def falling_factorial(rho, n: int):
    """``rho (rho-1) ... (rho-n+1)``; the empty product (``n = 0``) is 1.

    Exact (``Fraction``) for rational input, float for float input.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if isinstance(rho, float):
        out = 1.0
        for k in range(n):
            out *= rho - k
        return out
    rho = to_fraction(rho)
    out = Fraction(1)
    for k in range(n):
        out *= rho - k
    return out


def gen_binom(rho, n: int):
    """Generalized binomial coefficient ``C(rho, n)``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    ff = falling_factorial(rho, n)
    return ff / math.factorial(n)


def eta(poly: RealExpPoly) -> Fraction:
    """The fixed small exponent ``min{(1 - {rho_r})/2, rho_r - rho_{r-1}} / 2``.

    With a single term the gap to the next exponent is absent and the value
    is ``(1 - {rho_r})/4``.
    """
    if not poly.theorem_eligible:
        raise ValueError("eta is only defined when the leading exponent is not an integer")
    half_gap = (1 - poly.frac_leading_exponent) / 2
    if poly.r == 1:
        return half_gap / 2
    spacing = poly.exponents[-1] - poly.exponents[-2]
    return min(half_gap, spacing) / 2


@dataclass(frozen=True)
class CombinedPoly:
    """Main part ``F_1`` of a shifted linear combination ``<m, F(x + h)>``.

    ``terms`` holds ``(b_{n,i}, rho_i - n)`` for ``n0 <= n < ell`` in order of
    ``n`` then ``i``.
    """

    terms: tuple[tuple[Fraction, Fraction], ...]
    n0: int
    error_exponent: Fraction
    leading_coefficient: Fraction
    leading_exponent: Fraction
    coefficient_bound: float = field(default=math.inf)

    def __call__(self, x: float) -> float:
        return sum(float(b) * float(x) ** float(rho) for b, rho in self.terms)


def taylor_combination(poly: RealExpPoly, shifts: Sequence[int], m: Sequence[int], N: int) -> CombinedPoly:
    """Taylor main term of ``sum_j m_j F(x + h_j)``.

    ``b_{n,i} = (sum_j m_j h_j^n) d_i C(rho_i, n)`` for ``n`` up to
    ``len(shifts) - 1``; ``n0`` is the first ``n`` with a nonzero moment.
    """
    shifts = [int(h) for h in shifts]
    m = [int(v) for v in m]
    ell = len(shifts)
    if len(m) != ell:
        raise ValueError("m and shifts must have the same length")
    if not any(m):
        raise ValueError("m must be nonzero")
    if len(set(shifts)) != ell or sorted(shifts) != shifts:
        raise ValueError("shifts must be strictly increasing")
    if N < 1:
        raise ValueError("N must be positive")
    e = eta(poly)
    limit = float(N) ** float(e)
    if max(abs(v) for v in m) > limit:
        raise ValueError(f"max |m_j| exceeds N^eta = {limit}")

    moments = [sum(mj * h**n for mj, h in zip(m, shifts)) for n in range(ell)]
    n0 = next(n for n, mom in enumerate(moments) if mom != 0)
    terms = []
    for n in range(n0, ell):
        for d, rho in poly.terms:
            terms.append((moments[n] * d * gen_binom(rho, n), rho - n))
    biggest = max(
        abs(h**n * d * gen_binom(rho, n)) for n in range(ell) for h in shifts for d, rho in poly.terms
    )
    bound = ell**2 * poly.r * float(biggest) * limit
    lead = moments[n0] * poly.leading_coefficient * gen_binom(poly.leading_exponent, n0)
    return CombinedPoly(
        tuple(terms),
        n0,
        poly.frac_leading_exponent + e - 1,
        lead,
        poly.leading_exponent - n0,
        bound,
    )


def bkm_bound(X: float, g: float, k: int, q: int) -> float:
    """Three-term exponential-sum bound, without the implied constant.

    ``X^(1-1/K) + X ((log X)^k / g)^(1/K) + X (g / X^(q+2))^(1/(4QK - 2K))``
    with ``K = 2^k`` and ``Q = 2^q``.
    """
    if X < 2:
        raise ValueError("X must be at least 2")
    if k < 1 or q < 1:
        raise ValueError("k and q must be positive integers")
    top = float(X) ** (q + 2)
    if not 1 <= g <= top:
        raise ValueError("g must lie in [1, X^(q+2)]")
    K, Q = 2**k, 2**q
    first = X ** (1 - 1 / K)
    second = X * (math.log(X) ** k / g) ** (1 / K)
    third = X * (g / top) ** (1 / (4 * Q * K - 2 * K))
    return first + second + third
