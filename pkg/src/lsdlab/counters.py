"""Exact counts of every predicted quantity, by one streaming factorization pass.

Integers are processed in segments. Each segment is factored with the SPF
table by repeatedly peeling off the smallest prime together with its exponent;
every (n, p, e) event is handed to the requested accumulators, which maintain
one small per-n array each. Counts at several x are read off the same pass.

The group invariants are recomputed from the prime-power events:

* lambda*(n): U_n is a product of cyclic groups Z/phi(p^k) for odd p^k || n,
  plus Z/2 for 4 || n and Z/2 x Z/2^(k-2) for 2^k || n, k >= 3. Every nontrivial
  factor has even order, so the number of invariant factors equals the number of
  factors and the least invariant factor is the gcd of their orders (the first
  elementary divisor of a diagonal matrix is the gcd of its entries).
* lambda'(n): the least prime-power part over the same factors, capped at a
  bound larger than every q asked about.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import SEGMENT_SIZE, SpfTable, sieve_spf, primes_up_to
from .errors import CapacityError, DomainError
from .unitgroup import INFINITY

COUNT_CAPACITY_DEFAULT = 2 * 10**8


@dataclass
class Histogram:
    x: int
    bins: dict[int, int] = field(default_factory=dict)

    def total(self) -> int:
        return sum(self.bins.values())


# ---------------------------------------------------------------- accumulators

class _Accumulator:
    """Per-segment state updated from (position, prime, exponent) events."""

    def start(self, n: np.ndarray) -> None:
        raise NotImplementedError

    def feed(self, idx: np.ndarray, p: np.ndarray, e: np.ndarray) -> None:
        raise NotImplementedError


class RestrictedAcc(_Accumulator):
    """All prime factors lie in a residue set."""

    def __init__(self, q: int, residues):
        self.q = q
        self.mask = np.zeros(q, dtype=bool)
        for b in residues:
            if math.gcd(int(b), q) != 1:
                raise DomainError(f"{b} is not a unit mod {q}")
            self.mask[int(b) % q] = True

    def start(self, n):
        self.ok = np.ones(len(n), dtype=bool)

    def feed(self, idx, p, e):
        self.ok[idx] &= self.mask[p % self.q]


class LambdaStarAcc(_Accumulator):
    """gcd of the cyclic factor orders; 0 encodes the trivial group (lambda* infinite)."""

    def start(self, n):
        self.g = np.zeros(len(n), dtype=np.int64)

    def feed(self, idx, p, e):
        odd = p != 2
        order = np.where(odd, p ** np.maximum(e - 1, 0) * (p - 1), np.where(e >= 2, 2, 0))
        self.g[idx] = np.gcd(self.g[idx], order)


def least_prime_power_part(m: np.ndarray, cap: int) -> np.ndarray:
    """min(cap, least l^v || m over primes l < cap) for each entry of m >= 1."""
    m = m.copy()
    out = np.full(len(m), cap, dtype=np.int64)
    for ell in primes_up_to(cap - 1):
        ell = int(ell)
        part = np.ones(len(m), dtype=np.int64)
        hit = np.flatnonzero(m % ell == 0)
        while hit.size:
            part[hit] *= ell
            m[hit] //= ell
            hit = hit[m[hit] % ell == 0]
        out = np.where(part > 1, np.minimum(out, part), out)
    return out


class LambdaPrimeAcc(_Accumulator):
    """min(lambda'(n), cap); cap encodes 'at least cap', including the trivial groups."""

    def __init__(self, cap: int):
        self.cap = cap

    def start(self, n):
        self.v = np.full(len(n), self.cap, dtype=np.int64)

    def feed(self, idx, p, e):
        odd = p != 2
        local = np.full(len(p), self.cap, dtype=np.int64)
        if odd.any():
            local[odd] = least_prime_power_part(p[odd] - 1, self.cap)
        local[(~odd) & (e >= 2)] = 2
        self.v[idx] = np.minimum(self.v[idx], local)


class ClassCountAcc(_Accumulator):
    """omega_a(n) and Omega_a(n) for one residue class."""

    def __init__(self, q: int, a: int):
        if math.gcd(a, q) != 1:
            raise DomainError(f"gcd({a}, {q}) != 1")
        self.q, self.a = q, a % q

    def start(self, n):
        self.omega = np.zeros(len(n), dtype=np.int64)
        self.big_omega = np.zeros(len(n), dtype=np.int64)

    def feed(self, idx, p, e):
        hit = (p % self.q) == self.a
        self.omega[idx] += hit
        self.big_omega[idx] += hit * e


# ---------------------------------------------------------------- the pass

def _factor_segment(n: np.ndarray, spf: np.ndarray, accumulators) -> None:
    for acc in accumulators:
        acc.start(n)
    rem = n.astype(np.int64)
    active = np.flatnonzero(rem > 1)
    while active.size:
        r = rem[active]
        p = spf[r].astype(np.int64)
        e = np.zeros(active.size, dtype=np.int64)
        live = np.arange(active.size)
        while live.size:
            r[live] //= p[live]
            e[live] += 1
            live = live[r[live] % p[live] == 0]
        for acc in accumulators:
            acc.feed(active, p, e)
        rem[active] = r
        active = active[r > 1]


def factor_pass(xs, accumulators, reducers, table: SpfTable | None = None,
                capacity: int = COUNT_CAPACITY_DEFAULT, segment: int = SEGMENT_SIZE):
    """Stream n = 1..max(xs) and reduce each segment for every checkpoint x.

    ``reducers`` maps a name to (function(n_array) -> partial result, combine);
    the partial results for n <= x are combined in segment order.
    """
    xs = sorted({int(x) for x in xs})
    top = xs[-1]
    if top < 1:
        raise DomainError("x must be >= 1")
    if top > capacity:
        raise CapacityError(f"x={top} exceeds counting capacity {capacity}")
    if table is None or table.limit < top:
        table = sieve_spf(max(top, 2))
    results = {x: {} for x in xs}
    lo = 1
    while lo <= top:
        hi = min(lo + segment, top + 1)
        n = np.arange(lo, hi, dtype=np.int64)
        _factor_segment(n, table.spf, accumulators)
        for x in xs:
            if x < lo:
                continue
            length = min(hi, x + 1) - lo
            for name, (reduce, combine) in reducers.items():
                part = reduce(length)
                prev = results[x].get(name)
                results[x][name] = part if prev is None else combine(prev, part)
        lo = hi
    return results


def _add(a, b):
    return a + b


def _merge_bins(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return out


def _bins(values: np.ndarray) -> dict[int, int]:
    counts = np.bincount(values)
    return {int(k): int(c) for k, c in enumerate(counts) if c}


@dataclass(frozen=True)
class Quantity:
    """One countable quantity.

    kind is one of: restricted, lambda_star_divisible, lambda_star_equal,
    lambda_prime_at_least, lambda_prime_equal, omega_hist, Omega_hist.
    """

    kind: str
    q: int
    residues: tuple[int, ...] = ()
    a: int = 1


KINDS = ("restricted", "lambda_star_divisible", "lambda_star_equal",
         "lambda_prime_at_least", "lambda_prime_equal", "omega_hist", "Omega_hist")


def count_many(xs, quantities, table: SpfTable | None = None, capacity: int = COUNT_CAPACITY_DEFAULT):
    """Exact values of several quantities at several x from a single pass.

    Returns {x: {quantity: int or Histogram}}.
    """
    from .arith import next_prime_power

    accumulators = []
    reducers = {}
    star = None
    prime_acc = None
    need_cap = [next_prime_power(qq.q) for qq in quantities if qq.kind.startswith("lambda_prime")]
    for quantity in quantities:
        if quantity.kind not in KINDS:
            raise DomainError(f"unknown quantity {quantity.kind}")
        q = quantity.q
        if quantity.kind == "restricted":
            acc = RestrictedAcc(q, quantity.residues)
            accumulators.append(acc)
            reducers[quantity] = ((lambda L, acc=acc: int(acc.ok[:L].sum())), _add)
        elif quantity.kind.startswith("lambda_star"):
            if quantity.kind == "lambda_star_divisible" and (q < 4 or q % 2):
                raise DomainError("divisibility counts need even q >= 4")
            if quantity.kind == "lambda_star_equal" and q % 2:
                raise DomainError("lambda*(n) is even for n > 2; q must be even")
            if star is None:
                star = LambdaStarAcc()
                accumulators.append(star)
            if quantity.kind == "lambda_star_divisible":
                fn = (lambda L, q=q: int(np.count_nonzero(star.g[:L] % q == 0)))
            else:
                fn = (lambda L, q=q: int(np.count_nonzero(star.g[:L] == q)))
            reducers[quantity] = (fn, _add)
        elif quantity.kind.startswith("lambda_prime"):
            if prime_acc is None:
                prime_acc = LambdaPrimeAcc(max(need_cap) + 1)
                accumulators.append(prime_acc)
            if next_prime_power(q - 1) != q:
                raise DomainError(f"q={q} is not a prime power")
            if quantity.kind == "lambda_prime_at_least":
                fn = (lambda L, q=q: int(np.count_nonzero(prime_acc.v[:L] >= q)))
            else:
                q_next = next_prime_power(q)
                fn = (lambda L, q=q, qn=q_next: int(np.count_nonzero(
                    (prime_acc.v[:L] >= q) & (prime_acc.v[:L] < qn))))
            reducers[quantity] = (fn, _add)
        else:
            acc = ClassCountAcc(q, quantity.a)
            accumulators.append(acc)
            attr = "omega" if quantity.kind == "omega_hist" else "big_omega"
            reducers[quantity] = ((lambda L, acc=acc, attr=attr: _bins(getattr(acc, attr)[:L])), _merge_bins)
    raw = factor_pass(xs, accumulators, reducers, table, capacity)
    out = {}
    for x, vals in raw.items():
        out[x] = {}
        for quantity, v in vals.items():
            out[x][quantity] = Histogram(x, dict(sorted(v.items()))) if isinstance(v, dict) else v
    return out


def _one(x, quantity, table):
    return count_many([x], [quantity], table)[int(x)][quantity]


def count_restricted(x: int, q: int, residues, table: SpfTable | None = None) -> int:
    """#{n <= x : every prime factor of n lies in the residue set}."""
    return _one(x, Quantity("restricted", q, tuple(int(b) for b in residues)), table)


def count_lambda_star_divisible(x: int, q: int, table: SpfTable | None = None) -> int:
    return _one(x, Quantity("lambda_star_divisible", q), table)


def count_lambda_star_equal(x: int, q: int, table: SpfTable | None = None) -> int:
    return _one(x, Quantity("lambda_star_equal", q), table)


def count_lambda_prime_at_least(x: int, q: int, table: SpfTable | None = None) -> int:
    return _one(x, Quantity("lambda_prime_at_least", q), table)


def count_lambda_prime_equal(x: int, q: int, table: SpfTable | None = None) -> int:
    return _one(x, Quantity("lambda_prime_equal", q), table)


def histogram_omega_a(x: int, q: int, a: int, table: SpfTable | None = None) -> Histogram:
    return _one(x, Quantity("omega_hist", q, a=a), table)


def histogram_Omega_a(x: int, q: int, a: int, table: SpfTable | None = None) -> Histogram:
    return _one(x, Quantity("Omega_hist", q, a=a), table)


def lambda_star_values(x: int, table: SpfTable | None = None) -> np.ndarray:
    """lambda*(n) for n = 0..x as floats (INFINITY for n = 1, 2; entry 0 unused)."""
    acc = LambdaStarAcc()
    if table is None or table.limit < x:
        table = sieve_spf(max(x, 2))
    n = np.arange(1, x + 1, dtype=np.int64)
    _factor_segment(n, table.spf, [acc])
    out = np.empty(x + 1)
    out[0] = np.nan
    out[1:] = np.where(acc.g == 0, INFINITY, acc.g)
    return out
