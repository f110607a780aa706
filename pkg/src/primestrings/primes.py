"""Segmented sieving and the prime-counting / arithmetic functions built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import chain
from typing import Callable, Iterator

import gmpy2
import numpy as np

SEGMENT_SIZE = 1 << 22
CEILING = 1 << 40
MAX_PRIMORIAL = 10**6

# Miller-Rabin with these bases is deterministic below 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_LIMIT = 3_317_044_064_679_887_385_961_981


@dataclass(frozen=True)
class PrimeRange:
    """All primes in the half-open range ``[lo, hi)``."""

    lo: int
    hi: int
    primes: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes.tolist())

    @property
    def count(self) -> int:
        return len(self.primes)


@dataclass(frozen=True)
class PrimeString:
    """A window of ``m`` consecutive primes; ``first_index`` is ``k`` with ``primes[0] = p_k``."""

    first_index: int
    primes: tuple[int, ...]

    @property
    def diameter(self) -> int:
        return self.primes[-1] - self.primes[0]


@lru_cache(maxsize=8)
def small_primes(limit: int) -> np.ndarray:
    """Primes ``<= limit`` by a plain sieve."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    out = np.flatnonzero(flags).astype(np.int64)
    out.flags.writeable = False
    return out


def _check_range(lo: int, hi: int, ceiling: int) -> None:
    if lo < 2:
        raise ValueError("lo must be at least 2")
    if hi <= lo:
        raise ValueError("need lo < hi")
    if hi > ceiling:
        raise ValueError(f"range end {hi} exceeds sieve ceiling {ceiling}")


def _sieve_segment(a: int, b: int, base: np.ndarray) -> np.ndarray:
    odd0 = a | 1
    count = (b - odd0 + 1) // 2 if b > odd0 else 0
    mask = np.ones(count, dtype=bool)
    for p in base[1:].tolist():
        pp = p * p
        if pp >= b:
            break
        start = max(pp, -(-odd0 // p) * p)
        if not start & 1:
            start += p
        mask[(start - odd0) // 2 :: p] = False
    out = odd0 + 2 * np.flatnonzero(mask).astype(np.int64)
    if odd0 == 1 and count:
        out = out[1:]
    if a <= 2 < b:
        out = np.concatenate(([2], out)).astype(np.int64)
    return out


def iter_prime_segments(
    lo: int, hi: int, segment_size: int = SEGMENT_SIZE, ceiling: int = CEILING
) -> Iterator[np.ndarray]:
    """Yield the primes of ``[lo, hi)`` one segment at a time, in ascending order."""
    _check_range(lo, hi, ceiling)
    base = small_primes(math.isqrt(hi - 1))
    for a in range(lo, hi, segment_size):
        yield _sieve_segment(a, min(a + segment_size, hi), base)


def primes_in(lo: int, hi: int, segment_size: int = SEGMENT_SIZE, ceiling: int = CEILING) -> PrimeRange:
    segs = list(iter_prime_segments(lo, hi, segment_size, ceiling))
    primes = np.concatenate(segs) if segs else np.empty(0, dtype=np.int64)
    return PrimeRange(lo, hi, primes)


def prime_mask(lo: int, hi: int) -> np.ndarray:
    """Boolean array ``is_prime[n - lo]`` for ``n`` in ``[lo, hi)`` (any ``lo >= 0``)."""
    mask = np.zeros(max(hi - lo, 0), dtype=bool)
    start = max(lo, 2)
    if hi > start:
        for seg in iter_prime_segments(start, hi):
            mask[seg - lo] = True
    return mask


def count_primes(lo: int, hi: int) -> int:
    """Number of primes in ``[lo, hi)``; streams segments."""
    lo = max(lo, 2)
    if hi <= lo:
        return 0
    return sum(len(seg) for seg in iter_prime_segments(lo, hi))


def pi(N: int) -> int:
    return count_primes(2, N + 1)


def pi_ap(N: int, a: int, q: int) -> int:
    """Number of primes ``p <= N`` with ``p = a (mod q)``."""
    if q < 1 or not 0 <= a < q:
        raise ValueError("need q >= 1 and 0 <= a < q")
    if N < 2:
        return 0
    return sum(int(np.count_nonzero(seg % q == a)) for seg in iter_prime_segments(2, N + 1))


def pi_ap_range(N: int, M: int, a: int, q: int) -> int:
    """Primes in ``(N, M]`` congruent to ``a`` mod ``q``."""
    return pi_ap(M, a, q) - pi_ap(N, a, q)


def is_prime(n: int) -> bool:
    """Deterministic below 3.3e24; beyond that GMP's BPSW-based test."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n >= _MR_LIMIT:
        return bool(gmpy2.is_prime(n))
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    if n < 1:
        raise ValueError("n must be positive")
    out: dict[int, int] = {}
    for p in small_primes(math.isqrt(n)).tolist():
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mangoldt(n: int) -> float:
    """``log p`` when ``n = p^k``, else 0."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return 0.0
    f = factorize(n)
    if len(f) != 1:
        return 0.0
    (p,) = f
    return math.log(p)


def _prime_power_logs(N: int, a: int = 0, q: int = 1) -> Iterator[float]:
    # log p for every prime power p^k <= N with p^k = a (mod q), in increasing k then p
    k = 1
    while 2**k <= N:
        root = gmpy2.iroot(N, k)[0]
        for seg in iter_prime_segments(2, int(root) + 1):
            if q > 1:
                seg = seg[(seg**k) % q == a] if k > 1 else seg[seg % q == a]
            yield from np.log(seg.astype(np.float64)).tolist()
        k += 1


def psi(N: int) -> float:
    """Chebyshev ``psi(N) = sum_{n <= N} Lambda(n)``."""
    if N < 2:
        return 0.0
    return math.fsum(_prime_power_logs(N))


def psi_ap(N: int, a: int, q: int) -> float:
    """``sum_{n <= N, n = a mod q} Lambda(n)``."""
    if q < 1 or not 0 <= a < q:
        raise ValueError("need q >= 1 and 0 <= a < q")
    if N < 2:
        return 0.0
    return math.fsum(_prime_power_logs(N, a, q))


def theta(N: int) -> float:
    """``sum_{p <= N} log p``."""
    if N < 2:
        return 0.0
    return math.fsum(chain.from_iterable(np.log(s.astype(np.float64)).tolist() for s in iter_prime_segments(2, N + 1)))


def euler_phi(q: int) -> int:
    out = q
    for p in factorize(q):
        out = out // p * (p - 1)
    return out


def primorial(d: int) -> int:
    """Product of the primes ``<= d`` (1 for ``d < 2``)."""
    if d < 1:
        raise ValueError("d must be positive")
    if d > MAX_PRIMORIAL:
        raise OverflowError(f"primorial argument {d} exceeds {MAX_PRIMORIAL}")
    return math.prod(small_primes(d).tolist())


def consecutive_prime_strings(
    lo: int, hi: int, predicate: Callable[[int], bool], m: int
) -> list[PrimeString]:
    """Every length-``m`` window of consecutive primes in ``[lo, hi)`` satisfying ``predicate``.

    Consecutive means adjacent in the ordering of all primes.  Each maximal
    run of qualifying primes contributes all of its windows.
    """
    if m < 1:
        raise ValueError("m must be positive")
    lo = max(lo, 2)
    if hi <= lo:
        return []
    index = count_primes(2, lo)
    out: list[PrimeString] = []
    run: list[int] = []
    run_start = 0

    def flush():
        for i in range(len(run) - m + 1):
            out.append(PrimeString(run_start + i, tuple(run[i : i + m])))

    for seg in iter_prime_segments(lo, hi):
        for p in seg.tolist():
            index += 1
            if predicate(p):
                if not run:
                    run_start = index
                run.append(p)
            elif run:
                flush()
                run = []
    if run:
        flush()
    return out
