import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from primestrings.realexp import (
    PrecisionError,
    RealExpPoly,
    RigorousReal,
    bkm_bound,
    eta,
    eval_frac,
    eval_value,
    falling_factorial,
    gen_binom,
    parse_poly,
    taylor_combination,
)
from tests.oracles import frac_mp


# ---- parsing and the polynomial type


def test_parse_decimal_strings_are_exact():
    F = parse_poly("0.25*x^2.7 + x^1.2")
    assert F.terms == ((Fraction(1), Fraction(6, 5)), (Fraction(1, 4), Fraction(27, 10)))
    assert F.ell == 3
    assert F.theorem_eligible


@pytest.mark.parametrize(
    "text, terms",
    [
        ("x^0.5", [(1, "1/2")]),
        ("3*x - 2", [(-2, 0), (3, 1)]),
        ("x^{1.5} + 0.5x", [("1/2", 1), (1, "3/2")]),
        ("-1.5e-1*x^(7/3)", [("-3/20", "7/3")]),
        ("2 x^2.5 - x", [(-1, 1), (2, "5/2")]),
    ],
)
def test_parse_grammar(text, terms):
    want = RealExpPoly.from_terms([(Fraction(d), Fraction(r)) for d, r in terms])
    assert parse_poly(text) == want


@pytest.mark.parametrize("text", ["", "x^-1", "x^2 + x^2", "y^2", "0*x^3"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        parse_poly(text)


def test_format_round_trip():
    for text in ["x^0.5", "x^1.5 + 0.5*x", "0.25*x^2.7 + x^1.2", "-x^(1/3) + 7"]:
        F = parse_poly(text)
        assert parse_poly(str(F)) == F


def test_ell_is_derived():
    assert parse_poly("x^0.5").ell == 1
    assert parse_poly("x^1.5").ell == 2
    assert parse_poly("x^3").ell == 4
    assert not parse_poly("x^3").theorem_eligible


def test_shifted_merges_constant():
    F = parse_poly("x^0.5 + 0.25")
    assert F.shifted(Fraction(3, 4)) == parse_poly("x^0.5 + 1")
    assert F.shifted(Fraction(-1, 4)) == parse_poly("x^0.5")


# ---- binomials


@pytest.mark.parametrize(
    "rho, n, want",
    [("2.7", 0, 1), (3, 2, 3), ("0.5", 2, Fraction(-1, 8))],
)
def test_gen_binom_examples(rho, n, want):
    assert gen_binom(Fraction(rho), n) == want


@pytest.mark.parametrize(
    "rho, n, want",
    [("2.5", 1, Fraction(5, 2)), ("0.5", 3, Fraction(3, 8)), ("4.2", 0, 1)],
)
def test_falling_factorial_examples(rho, n, want):
    assert falling_factorial(Fraction(rho), n) == want


@given(
    st.fractions(min_value=-10, max_value=10, max_denominator=50),
    st.integers(min_value=0, max_value=12),
)
def test_binom_times_factorial_is_falling_factorial(rho, n):
    assert gen_binom(rho, n) * math.factorial(n) == falling_factorial(rho, n)


@given(st.integers(min_value=0, max_value=20), st.integers(min_value=0, max_value=20))
def test_binom_matches_integer_binomial(a, n):
    assert gen_binom(Fraction(a), n) == math.comb(a, n)


def test_binom_float_input():
    assert gen_binom(0.5, 2) == pytest.approx(-0.125)


# ---- eta


@pytest.mark.parametrize(
    "text, want",
    [("x^1.2 + x^2.5", Fraction(1, 8)), ("x^2.9", Fraction(1, 40)), ("x^0.5", Fraction(1, 8))],
)
def test_eta_examples(text, want):
    assert eta(parse_poly(text)) == want


def test_eta_rejects_integer_exponent():
    with pytest.raises(ValueError):
        eta(parse_poly("x^2 + x^0.5"))


@given(
    st.fractions(min_value=Fraction(1, 10), max_value=5, max_denominator=30).filter(lambda r: r.denominator > 1),
    st.fractions(min_value=0, max_value=Fraction(29, 30), max_denominator=30),
)
def test_eta_positive(rho, frac_gap):
    lower = rho * frac_gap
    F = RealExpPoly.from_terms([(1, lower), (1, rho)]) if lower < rho else RealExpPoly.from_terms([(1, rho)])
    assert eta(F) > 0


# ---- evaluation


def test_eval_frac_examples():
    assert eval_frac(parse_poly("x^0.5"), 4).exact == 0
    x = eval_frac(parse_poly("x^0.5"), 2)
    assert abs(float(x) - 0.41421356237309504880) < 1e-15
    assert eval_frac(parse_poly("x^1.5 + x"), 4).exact == 0


def test_eval_frac_radius_target():
    F = parse_poly("0.25*x^2.7 + x^1.2")
    for r in (2.0**-20, 2.0**-40, 2.0**-100):
        x = eval_frac(F, 10**7 + 3, r)
        assert 0 <= x.radius <= r


def test_eval_frac_precision_ceiling():
    F = parse_poly("x^2.5")
    with pytest.raises(PrecisionError):
        eval_frac(F, 10**300, 2.0**-40, max_prec=256)


def test_eval_value_exact_integer():
    assert eval_value(parse_poly("x^2 + 3"), 5).exact == 28


@given(
    st.sampled_from(["x^0.5", "x^1.5 + 0.5*x", "0.25*x^2.7 + x^1.2", "-x^(1/3) + 2*x^1.75", "x^2.9"]),
    st.integers(min_value=1, max_value=10**9),
)
def test_eval_frac_matches_mpmath(text, n):
    F = parse_poly(text)
    x = eval_frac(F, n, 2.0**-60)
    ref = frac_mp(F.terms, n)
    # compare on the circle: the enclosure is read modulo 1
    diff = abs(float(x) - float(ref))
    assert min(diff, 1 - diff) <= x.radius + 1e-30 + 2.0**-55


@given(st.integers(min_value=1, max_value=10**12))
def test_enclosures_at_two_radii_overlap(n):
    F = parse_poly("x^1.5 + 0.5*x")
    a = eval_frac(F, n, 2.0**-30)
    b = eval_frac(F, n, 2.0**-90)
    if a.exact is None and b.exact is None:
        # both balls are reduced mod 1 the same way unless one straddles an integer
        assert a.overlaps(b) or abs(float(a) - float(b)) > 0.5


def test_rigorous_real_arithmetic():
    a = RigorousReal.from_value("0.1")
    b = RigorousReal.from_value(Fraction(1, 3))
    assert (a + b).exact == Fraction(13, 30)
    assert (a * b).exact == Fraction(1, 30)
    assert (-a).exact == Fraction(-1, 10)
    assert a.certainly_lt(Fraction(1, 5)) and a.certainly_ge(Fraction(1, 10))


# ---- Taylor combination


def test_taylor_identity():
    F = parse_poly("x^1.5")
    C = taylor_combination(F, [0], [1], 1000)
    assert C.n0 == 0
    assert C.leading_coefficient == 1
    assert C.leading_exponent == Fraction(3, 2)


def test_taylor_difference():
    C = taylor_combination(parse_poly("x^1.5"), [0, 1], [1, -1], 10**6)
    assert C.n0 == 1
    assert C.leading_coefficient == Fraction(-3, 2)
    assert C.leading_exponent == Fraction(1, 2)


def test_taylor_sum():
    C = taylor_combination(parse_poly("x^1.5"), [0, 6], [1, 1], 10**6)
    assert C.n0 == 0
    assert C.leading_coefficient == 2


def test_taylor_errors():
    F = parse_poly("x^1.5")
    with pytest.raises(ValueError):
        taylor_combination(F, [0, 1], [0, 0], 100)
    with pytest.raises(ValueError):
        taylor_combination(F, [0, 0], [1, 1], 100)
    with pytest.raises(ValueError):
        taylor_combination(F, [0, 1], [10**6, 1], 100)


@given(
    st.lists(st.integers(min_value=-3, max_value=3), min_size=3, max_size=3).filter(any),
    st.lists(st.integers(min_value=0, max_value=40), min_size=3, max_size=3, unique=True),
)
def test_vandermonde_termination(m, shifts):
    shifts = sorted(shifts)
    C = taylor_combination(parse_poly("x^2.5"), shifts, m, 10**8)
    assert 0 <= C.n0 <= len(shifts) - 1
    assert C.leading_coefficient != 0


def test_taylor_residual_decays():
    F = parse_poly("x^2.5 + x^1.2")
    shifts, m = [0, 3, 7], [1, -2, 1]
    C = taylor_combination(F, shifts, m, 10**12)
    e = float(C.error_exponent)
    vals = []
    for j in range(10, 21):
        x = 2**j * max(shifts)
        with mpmath.workdps(60):
            lhs = sum(mj * sum(mpmath.mpf(d.numerator) / d.denominator * mpmath.power(x + h, mpmath.mpf(rho.numerator) / rho.denominator) for d, rho in F.terms) for mj, h in zip(m, shifts))
            rhs = sum(mpmath.mpf(b.numerator) / b.denominator * mpmath.power(x, mpmath.mpf(ex.numerator) / ex.denominator) for b, ex in C.terms)
            vals.append(float(abs(lhs - rhs) / mpmath.power(x, e)))
    half = len(vals) // 2
    assert max(vals[half:]) <= max(vals[:half])


@given(
    st.lists(st.integers(min_value=-4, max_value=4), min_size=3, max_size=3).filter(any),
    st.lists(st.integers(min_value=0, max_value=60), min_size=3, max_size=3, unique=True),
)
def test_taylor_leading_coefficient_lower_bound(m, shifts):
    # the first nonzero moment is a nonzero integer, so |b| >= |d C(rho, n0)|
    F = parse_poly("0.75*x^2.5 + x^0.5")
    C = taylor_combination(F, sorted(shifts), m, 10**8)
    floor = abs(F.leading_coefficient * gen_binom(F.leading_exponent, C.n0))
    assert abs(C.leading_coefficient) >= floor > 0


# ---- bkm bound


def test_bkm_third_term_equals_X():
    X, k, q = 50.0, 2, 1
    g = X ** (q + 2)
    K = 2**k
    first = X ** (1 - 1 / K)
    second = X * (math.log(X) ** k / g) ** (1 / K)
    assert bkm_bound(X, g, k, q) == pytest.approx(first + second + X)


def test_bkm_log_one():
    k = 3
    X = math.e
    g = math.e**k
    K = 2**k
    second = math.e * (k**0 / math.e**k) ** (1 / K)  # (log X)^k = 1
    got = bkm_bound(X, g, k, 1) - X ** (1 - 1 / K) - X * (g / X**3) ** (1 / (4 * 2 * K - 2 * K))
    assert got == pytest.approx(second)


def test_bkm_numeric():
    # K = 2, Q = 2: third exponent is 1/(4QK - 2K) = 1/12
    want = 32 + 1024 * (math.log(1024) / 32) ** 0.5 + 1024 * (32 / 1024**3) ** (1 / 12)
    assert bkm_bound(1024, 32, 1, 1) == pytest.approx(want)


def test_bkm_rejects_g():
    with pytest.raises(ValueError):
        bkm_bound(100, 0.5, 1, 1)
    with pytest.raises(ValueError):
        bkm_bound(100, 100.0**3 * 2, 1, 1)
