"""Integer arithmetic, prime sieves and scalar special functions.

Everything here is shared plumbing: factorizations feed the unit-group code,
the smallest-prime-factor table drives the exact counters, and the Gamma and
digamma wrappers are used by the L-value and prediction code.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterator

import numpy as np
from scipy import special

from .errors import CapacityError, DomainError, NotFoundError

SPF_LIMIT_DEFAULT = 200_000_000
SEGMENT_SIZE = 1 << 22
PRIME_SEARCH_BOUND = 10**9
CACHE_MAGIC = b"LSDLAB01"

# Deterministic Miller-Rabin bases, valid for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@dataclass(frozen=True)
class Factorization:
    """Canonical factorization as a tuple of (prime, exponent) pairs."""

    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        last = 1
        for p, e in self.entries:
            if p <= last or e < 1:
                raise DomainError(f"not a canonical factorization: {self.entries}")
            last = p

    @property
    def n(self) -> int:
        return math.prod(p**e for p, e in self.entries)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.entries)

    def exponent(self, p: int) -> int:
        for prime, e in self.entries:
            if prime == p:
                return e
        return 0

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True, eq=False)
class SpfTable:
    """Smallest prime factor of every integer in [0, limit]; entries 0 and 1 are 0."""

    limit: int
    spf: np.ndarray

    def __getitem__(self, n):
        return self.spf[n]


def as_factorization(n) -> Factorization:
    """Accept either an integer or a Factorization."""
    if isinstance(n, Factorization):
        return n
    return factorize(int(n))


# ---------------------------------------------------------------- primes

def _small_primes(limit: int) -> np.ndarray:
    """Plain sieve of Eratosthenes, used for limits up to a few million."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mark = np.ones(limit + 1, dtype=bool)
    mark[:2] = False
    mark[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if mark[p]:
            mark[p * p :: 2 * p] = False
    return np.flatnonzero(mark).astype(np.int64)


def primes_up_to(limit: int) -> np.ndarray:
    """All primes p <= limit as a sorted int64 array (segmented odd-only sieve)."""
    limit = int(limit)
    if limit <= 1 << 22:
        return _small_primes(limit)
    base = _small_primes(math.isqrt(limit))[1:]  # odd base primes
    chunks = [np.array([2], dtype=np.int64)]
    # Segment over odd numbers: index i stands for lo + 2i.
    half = SEGMENT_SIZE
    lo = 3
    while lo <= limit:
        hi = min(lo + 2 * half, limit + 1)
        size = (hi - lo + 1) // 2
        mark = np.ones(size, dtype=bool)
        for p in base:
            p = int(p)
            pp = p * p
            if pp >= hi:
                break
            start = max(pp, ((lo + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            mark[(start - lo) // 2 :: p] = False
        found = lo + 2 * np.flatnonzero(mark).astype(np.int64)
        chunks.append(found[found <= limit])
        lo = hi if hi % 2 == 1 else hi + 1
    return np.concatenate(chunks)


@lru_cache(maxsize=4)
def cached_primes(limit: int) -> np.ndarray:
    """Read-only shared copy of ``primes_up_to(limit)``."""
    primes = primes_up_to(limit)
    primes.setflags(write=False)
    return primes


def sieve_spf(limit: int, max_limit: int = SPF_LIMIT_DEFAULT) -> SpfTable:
    """Smallest-prime-factor table for 0..limit, filled segment by segment.

    Within a segment every base prime marks the multiples from p*p on that are
    still unmarked; base primes are visited in increasing order, so the first
    mark is the smallest factor. Unmarked entries >= 2 are primes.
    """
    limit = int(limit)
    if limit < 2 or limit > max_limit:
        raise CapacityError(f"SPF limit {limit} outside [2, {max_limit}]")
    dtype = np.uint32
    spf = np.zeros(limit + 1, dtype=dtype)
    base = _small_primes(math.isqrt(limit))
    for lo in range(0, limit + 1, SEGMENT_SIZE):
        hi = min(lo + SEGMENT_SIZE, limit + 1)
        seg = spf[lo:hi]
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            view = seg[start - lo :: p]
            view[view == 0] = p
        rest = np.flatnonzero(seg == 0)
        rest = rest[rest + lo >= 2]
        seg[rest] = (rest + lo).astype(dtype)
    spf.setflags(write=False)
    return SpfTable(limit, spf)


def save_spf_table(table: SpfTable, path) -> None:
    """Write the table in the cache format: magic, uint64 limit, uint32 entries (all little endian)."""
    with open(Path(path), "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(np.array([table.limit], dtype="<u8").tobytes())
        fh.write(np.ascontiguousarray(table.spf, dtype="<u4").tobytes())


def load_spf_table(path) -> SpfTable:
    """Read a cache file written by :func:`save_spf_table`."""
    raw = Path(path).read_bytes()
    if raw[:8] != CACHE_MAGIC:
        raise DomainError(f"{path}: not an SPF cache file")
    limit = int(np.frombuffer(raw, dtype="<u8", count=1, offset=8)[0])
    spf = np.frombuffer(raw, dtype="<u4", offset=16)
    if spf.size != limit + 1:
        raise DomainError(f"{path}: truncated SPF cache")
    return SpfTable(limit, spf.astype(np.uint32))


def spf_table_for(limit: int, cache_path=None) -> SpfTable:
    """Load a table covering ``limit`` from the cache if possible, else sieve (and save)."""
    if cache_path is not None and Path(cache_path).exists():
        table = load_spf_table(cache_path)
        if table.limit >= limit:
            return table
    table = sieve_spf(max(limit, 2))
    if cache_path is not None:
        save_spf_table(table, cache_path)
    return table


# ---------------------------------------------------------------- integers

def factorize(n: int, table: SpfTable | None = None) -> Factorization:
    """Prime factorization of n >= 1, via the SPF table when given."""
    n = int(n)
    if n < 1:
        raise DomainError("factorize needs n >= 1")
    entries = []
    if table is not None:
        if n > table.limit:
            raise CapacityError(f"{n} exceeds SPF table limit {table.limit}")
        while n > 1:
            p = int(table.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            entries.append((p, e))
        return Factorization(tuple(entries))
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            entries.append((p, e))
    p = 5
    step = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            entries.append((p, e))
        p += step
        step = 6 - step
    if n > 1:
        entries.append((n, 1))
    return Factorization(tuple(entries))


def euler_phi(f) -> int:
    """Euler's totient from a factorization (or an integer)."""
    f = as_factorization(f)
    return math.prod(p ** (e - 1) * (p - 1) for p, e in f)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    n = int(n)
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_power_base(n: int) -> int | None:
    """Return p if n = p^k with k >= 1, else None."""
    n = int(n)
    if n < 2:
        return None
    f = factorize(n)
    return f.entries[0][0] if len(f) == 1 else None


def next_prime_power(q: int) -> int:
    """Smallest prime power strictly greater than q."""
    n = int(q) + 1
    while prime_power_base(n) is None:
        n += 1
    return n


def least_prime_in_ap(q: int, a: int, bound: int = PRIME_SEARCH_BOUND) -> int:
    """Least prime p with p = a (mod q)."""
    q, a = int(q), int(a)
    if q < 1 or math.gcd(a, q) != 1:
        raise DomainError(f"gcd({a}, {q}) != 1")
    n = a % q
    if n < 2:
        n += q * ((2 - n + q - 1) // q)
    while n <= bound:
        if is_prime(n):
            return n
        n += q
    raise NotFoundError(f"no prime = {a} mod {q} below {bound}")


# ---------------------------------------------------------------- special functions

def logarithmic_integral(y: float) -> float:
    """li(y) = integral from 2 to y of dt / log t."""
    if not y >= 2:
        raise DomainError("logarithmic_integral needs y >= 2")
    if y == 2:
        return 0.0
    # Ei(log y) - Ei(log 2) is the same integral after t = e^u.
    return float(special.expi(math.log(y)) - special.expi(math.log(2.0)))


def digamma(x: float) -> float:
    if not x > 0:
        raise DomainError("digamma is only provided for x > 0")
    return float(special.digamma(x))


def complex_gamma(z) -> complex:
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise DomainError(f"Gamma has a pole at {z.real:g}")
    return complex(special.gamma(z))


def rgamma(z):
    """1/Gamma(z) as an entire function (exact zeros at nonpositive integers)."""
    return special.rgamma(z)
