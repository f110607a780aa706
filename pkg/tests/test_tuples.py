import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from primestrings.primes import primorial
from primestrings.realexp import parse_poly
from primestrings.tuples import (
    ShiftedTuple,
    basis_coefficients,
    build_admissible,
    check_admissible,
    inclusion_check,
    relation_residual,
    shrink_delta,
)
from tests.oracles import lagrange_coefficients

small_tuples = st.integers(min_value=1, max_value=3).flatmap(
    lambda ell: st.tuples(st.just(ell), st.integers(min_value=ell, max_value=8))
)


def test_build_1_2():
    t = build_admissible(1, 2)
    assert t.h == (0, 4)
    assert t.q_scale == 1
    assert t.B == ((1,),)


def test_build_2_3():
    t = build_admissible(2, 3)
    assert t.h == (0, 6, 648)
    assert t.q_scale == 36
    assert t.row(3) == (-107, 108)
    assert -107 + 108 == 1 and 108 * 6 == 648


@pytest.mark.parametrize("d", [1, 2, 5, 9])
def test_ell_one_rows_are_unit(d):
    t = build_admissible(1, d)
    assert all(row == (1,) for row in t.B)


def test_build_errors():
    with pytest.raises(ValueError):
        build_admissible(3, 2)
    with pytest.raises(ValueError):
        build_admissible(0, 2)
    with pytest.raises(ValueError):
        build_admissible(1, 31)


@given(st.lists(st.integers(min_value=-50, max_value=50), min_size=1, max_size=5, unique=True))
def test_basis_matches_lagrange(h):
    assert basis_coefficients(h) == lagrange_coefficients(h)


@given(small_tuples)
def test_tuple_invariants(ld):
    ell, d = ld
    t = build_admissible(ell, d)
    P = primorial(d)
    assert t.h[0] == 0
    assert t.h[:ell] == tuple((j - 1) * P for j in range(1, ell + 1))
    assert t.h[ell:] == tuple(t.q_scale * s * P for s in range(ell + 1, d + 1))
    assert list(t.h) == sorted(set(t.h))
    assert t.moment_identities_hold()
    assert all(sum(row) == 1 for row in t.B)
    assert check_admissible(t.h).admissible


@given(small_tuples)
def test_q_scale_from_reduced_denominators(ld):
    ell, d = ld
    t = build_admissible(ell, d)
    C = lagrange_coefficients(list(t.leading))
    assert t.q_scale == math.prod(c.denominator for row in C for c in row)


def test_json_round_trip():
    t = build_admissible(2, 4)
    assert ShiftedTuple.from_json(t.to_json()) == t


@pytest.mark.parametrize(
    "h, ok, cover",
    [([0], True, None), ([0, 2, 4], False, 3), ([0, 2, 6], True, None), ([0, 1], False, 2)],
)
def test_check_admissible_examples(h, ok, cover):
    res = check_admissible(h)
    assert res.admissible is ok
    assert res.covering_prime == cover


@given(st.lists(st.integers(min_value=0, max_value=200), min_size=1, max_size=8, unique=True))
def test_admissible_witnesses(h):
    res = check_admissible(h)
    if res.admissible:
        for p, n in res.witnesses.items():
            assert all((n + x) % p for x in h)
    else:
        p = res.covering_prime
        assert {(-x) % p for x in h} == set(range(p))


def test_residual_sqrt():
    F = parse_poly("x^0.5")
    t = build_admissible(1, 2)
    r = relation_residual(F, t, 2, 10**6, 2.0**-80)
    with mpmath.workdps(50):
        want = mpmath.sqrt(10**6 + 4) - 1000
    assert abs(float(r.midpoint) - float(want)) <= r.radius + 1e-30
    assert float(want) == pytest.approx(0.002, rel=1e-3)


def test_residual_bounded():
    # |residual| * x^0.5 goes from about 1.5209e5 at x = 2^12 to 1.5600e5 at 2^24
    F = parse_poly("x^1.5")
    t = build_admissible(2, 3)
    vals = [abs(float(relation_residual(F, t, 3, 2**j).midpoint)) * 2 ** (j / 2) for j in range(12, 25)]
    third = len(vals) // 3
    assert max(vals[-third:]) <= 2 * max(vals[:third])
    assert vals[0] == pytest.approx(152082.937, rel=1e-6)
    assert vals[-1] == pytest.approx(156004.986, rel=1e-6)


def test_residual_rejects_bad_s():
    t = build_admissible(2, 3)
    with pytest.raises(ValueError):
        relation_residual(parse_poly("x^1.5"), t, 2, 100)


@pytest.mark.parametrize(
    "ell, d, eps, want",
    [(1, 3, "0.1", Fraction(1, 20)), (2, 3, "0.432", Fraction(1, 1000)), (2, 2, "0.3", Fraction(3, 10))],
)
def test_shrink_delta_examples(ell, d, eps, want):
    assert shrink_delta(build_admissible(ell, d), eps) == want


@given(
    small_tuples,
    st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(999, 1000)),
    st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(999, 1000)),
)
def test_shrink_delta_monotone_in_eps(ld, e1, e2):
    t = build_admissible(*ld)
    lo, hi = sorted((e1, e2))
    assert 0 < shrink_delta(t, lo) <= shrink_delta(t, hi) <= hi


def test_shrink_delta_monotone_in_b():
    # same ell, larger max|b| gives a smaller box
    assert build_admissible(2, 4).max_b >= build_admissible(2, 3).max_b
    assert shrink_delta(build_admissible(2, 4), "0.4") <= shrink_delta(build_admissible(2, 3), "0.4")


def test_shrink_delta_range():
    t = build_admissible(1, 2)
    for eps in (0, 1, "1.5"):
        with pytest.raises(ValueError):
            shrink_delta(t, eps)


def test_inclusion_trivial_d_equals_ell():
    F = parse_poly("x^0.5")
    rep = inclusion_check(F, build_admissible(1, 1), "0.3", 100, 5000)
    assert rep.hits > 0
    assert rep.violations == () and rep.n0 == 100


def test_inclusion_x15_scan():
    # exhaustive scan: Delta = 1/2160, the box is never hit on this range
    F = parse_poly("x^1.5")
    rep = inclusion_check(F, build_admissible(2, 3), "0.2", 2**20, 2**20 + 10**5)
    assert rep.delta == Fraction(1, 2160)
    assert rep.hits == 0 and rep.violations == () and rep.n0 == 2**20
    assert rep.unknown_box == 0


def test_inclusion_sqrt_against_float_oracle():
    F = parse_poly("x^0.5")
    t = build_admissible(1, 3)
    rep = inclusion_check(F, t, "0.2", 10, 10**5)

    def dist(x):
        f = x % 1
        return min(f, 1 - f)

    hits = [n for n in range(10, 10**5) if math.sqrt(n) % 1 < 0.1]
    bad = [n for n in hits if any(dist(math.sqrt(n + h)) >= 0.2 for h in t.h)]
    assert rep.hits == len(hits) == 10204
    assert list(rep.violations) == bad
    assert rep.n0 == bad[-1] + 1 == 7587
