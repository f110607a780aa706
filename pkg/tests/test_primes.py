import math

import pytest
from hypothesis import given, strategies as st

from primestrings.primes import (
    CEILING,
    consecutive_prime_strings,
    count_primes,
    euler_phi,
    factorize,
    is_prime,
    mangoldt,
    pi,
    pi_ap,
    pi_ap_range,
    prime_mask,
    primes_in,
    primorial,
    psi,
    psi_ap,
    theta,
)
from tests.oracles import is_prime_trial, primes_trial

# observed max of (psi - theta) / (sqrt(N) log(N)^2) over 3 <= N < 3000 is 0.1803 at N = 4
PSI_THETA_C = 0.19


def test_small_counts():
    assert count_primes(2, 101) == 25
    assert list(primes_in(2, 30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert count_primes(1, 2) == 0
    assert count_primes(10, 10) == 0


def test_pi_million():
    assert pi(10**6) == 78498


def test_range_errors():
    with pytest.raises(ValueError):
        primes_in(1, 10)
    with pytest.raises(ValueError):
        primes_in(10, 10)
    with pytest.raises(ValueError):
        primes_in(2, CEILING + 1)


@given(st.integers(min_value=2, max_value=20000), st.integers(min_value=1, max_value=3000))
def test_sieve_matches_trial_division(lo, width):
    assert list(primes_in(lo, lo + width)) == primes_trial(lo, lo + width)


@given(st.integers(min_value=2, max_value=5000), st.integers(min_value=1, max_value=700), st.integers(min_value=16, max_value=200))
def test_segment_size_does_not_matter(lo, width, seg):
    assert list(primes_in(lo, lo + width, segment_size=seg)) == primes_trial(lo, lo + width)


def test_prime_mask_from_zero():
    mask = prime_mask(0, 12)
    assert mask.nonzero()[0].tolist() == [2, 3, 5, 7, 11]


@pytest.mark.parametrize("N, a, q, want", [(20, 3, 4, 4), (20, 0, 1, 8), (20, 0, 2, 1), (100, 1, 10, 5)])
def test_pi_ap_examples(N, a, q, want):
    assert pi_ap(N, a, q) == want


@given(st.integers(min_value=2, max_value=5000), st.integers(min_value=1, max_value=30))
def test_residue_classes_partition(N, q):
    assert sum(pi_ap(N, a, q) for a in range(q)) == pi(N)


@given(st.integers(min_value=1, max_value=3000), st.integers(min_value=0, max_value=3000), st.integers(min_value=1, max_value=12))
def test_pi_ap_range(N, width, q):
    M = N + width
    for a in range(q):
        assert pi_ap_range(N, M, a, q) == pi_ap(M, a, q) - pi_ap(N, a, q)


@given(st.integers(min_value=0, max_value=10**6))
def test_is_prime_small(n):
    assert is_prime(n) == is_prime_trial(n)


def test_is_prime_large():
    assert is_prime(2**61 - 1)
    assert not is_prime(2**61 + 1)
    assert is_prime(2**127 - 1)
    # strong pseudoprime to bases 2..37 is still rejected
    assert not is_prime(3825123056546413051)
    assert not is_prime(318665857834031151167461)


@given(st.integers(min_value=2, max_value=10**9))
def test_factorize_round_trip(n):
    f = factorize(n)
    assert math.prod(p**k for p, k in f.items()) == n
    assert all(is_prime_trial(p) for p in f)


@pytest.mark.parametrize("n, want", [(1, 0.0), (8, math.log(2)), (9, math.log(3)), (12, 0.0), (13, math.log(13))])
def test_mangoldt(n, want):
    assert mangoldt(n) == want


def test_psi_examples():
    assert psi(10) == pytest.approx(math.log(2520), abs=0.0)
    assert psi_ap(10, 0, 2) == pytest.approx(3 * math.log(2), abs=0.0)
    assert psi(100) == pytest.approx(94.045, abs=1e-3)
    assert theta(10) == pytest.approx(math.log(210), rel=1e-15)


@given(st.integers(min_value=3, max_value=3000))
def test_psi_theta_gap(N):
    gap = psi(N) - theta(N)
    assert gap >= -1e-9
    assert gap <= PSI_THETA_C * math.sqrt(N) * math.log(N) ** 2


@given(st.integers(min_value=2, max_value=400))
def test_psi_is_sum_of_mangoldt(N):
    assert psi(N) == pytest.approx(math.fsum(mangoldt(n) for n in range(1, N + 1)), rel=1e-12)


@pytest.mark.parametrize("q, want", [(1, 1), (2, 1), (9, 6), (12, 4), (97, 96), (100, 40)])
def test_euler_phi(q, want):
    assert euler_phi(q) == want


def test_primorial():
    assert primorial(1) == 1
    assert primorial(6) == 30
    assert primorial(10) == 210
    with pytest.raises(OverflowError):
        primorial(10**6 + 1)


def test_strings_always_true():
    got = consecutive_prime_strings(2, 12, lambda p: True, 2)
    assert [(s.first_index, s.primes) for s in got] == [(1, (2, 3)), (2, (3, 5)), (3, (5, 7)), (4, (7, 11))]
    assert [s.diameter for s in got] == [1, 2, 2, 4]


def test_strings_always_false():
    assert consecutive_prime_strings(2, 1000, lambda p: False, 1) == []


def test_strings_break_on_failing_prime():
    got = consecutive_prime_strings(2, 30, lambda p: p != 7, 3)
    assert all(7 not in s.primes for s in got)
    assert [s.primes for s in got][:2] == [(2, 3, 5), (11, 13, 17)]


def test_strings_sqrt_oracle():
    pred = lambda p: math.sqrt(p) % 1 < 0.1  # noqa: E731
    got = consecutive_prime_strings(2, 5000, pred, 2)
    ps = primes_trial(2, 5000)
    want = [(i + 1, (ps[i], ps[i + 1])) for i in range(len(ps) - 1) if pred(ps[i]) and pred(ps[i + 1])]
    assert [(s.first_index, s.primes) for s in got] == want


@given(st.integers(min_value=2, max_value=5000), st.integers(min_value=1, max_value=2000))
def test_strings_m1_is_all_primes(lo, width):
    got = consecutive_prime_strings(lo, lo + width, lambda p: True, 1)
    assert [s.primes[0] for s in got] == primes_trial(lo, lo + width)
    if got:
        assert got[0].first_index == pi(got[0].primes[0])
