"""Structure of the unit group U_n = (Z/nZ)^*.

Provides the primary and invariant-factor decompositions, the extremal
invariants lambda*(n) (least invariant factor), lambda'(n) (least primary
factor) and the Carmichael function, together with the congruence
characterizations of "q divides lambda*(n)" and "lambda'(n) >= q" and the
auxiliary modulus Q, residue set B_Q and density exponent B(q).
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import Factorization, as_factorization, euler_phi, factorize, prime_power_base
from .errors import CapacityError, DomainError

INFINITY = math.inf
Q_CAPACITY_DEFAULT = 10**7


def divides(q: int, value) -> bool:
    """q | value, with every q dividing INFINITY."""
    return value == INFINITY or value % q == 0


@dataclass(frozen=True)
class PrimaryDecomposition:
    """U_n as a product of cyclic groups of the listed prime-power orders (sorted)."""

    orders: tuple[int, ...]

    def by_prime(self) -> dict[int, list[int]]:
        """Exponents of each prime, sorted descending."""
        out = defaultdict(list)
        for order in self.orders:
            f = factorize(order)
            (ell, v), = f.entries
            out[ell].append(v)
        return {ell: sorted(vs, reverse=True) for ell, vs in sorted(out.items())}


@dataclass(frozen=True)
class InvariantFactors:
    """Invariant factors d_1 | d_2 | ... | d_r, all > 1."""

    factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.factors)


def _primary_parts(m: int) -> list[int]:
    return [p**e for p, e in factorize(m)] if m > 1 else []


def unit_group_primary(f) -> PrimaryDecomposition:
    """Primary decomposition of U_n assembled from the U_{p^k} for p^k || n."""
    f = as_factorization(f)
    orders = []
    for p, k in f:
        if p == 2:
            if k == 2:
                orders.append(2)
            elif k >= 3:
                orders += [2, 2 ** (k - 2)]
        else:
            orders += _primary_parts(p - 1)
            if k >= 2:
                orders.append(p ** (k - 1))
    return PrimaryDecomposition(tuple(sorted(orders)))


def invariant_factors(pd: PrimaryDecomposition) -> InvariantFactors:
    """Combine the i-th largest exponents of each prime into d_{r+1-i}."""
    groups = pd.by_prime()
    r = max((len(v) for v in groups.values()), default=0)
    factors = [1] * r
    for ell, exps in groups.items():
        for i, v in enumerate(exps):
            factors[r - 1 - i] *= ell**v
    return InvariantFactors(tuple(factors))


def lambda_star(n):
    """Least invariant factor of U_n, INFINITY for the trivial groups n = 1, 2."""
    inv = invariant_factors(unit_group_primary(n))
    return inv.factors[0] if inv.factors else INFINITY


def lambda_prime(n):
    """Least primary factor of U_n, INFINITY for n = 1, 2."""
    pd = unit_group_primary(n)
    return pd.orders[0] if pd.orders else INFINITY


def carmichael_lambda(n) -> int:
    """Exponent of U_n (largest invariant factor); 1 for the trivial groups."""
    inv = invariant_factors(unit_group_primary(n))
    return inv.factors[-1] if inv.factors else 1


# ---------------------------------------------------------------- congruence criteria

def _largest_prime_data(q: int) -> tuple[int, int, bool]:
    """(P, e_P, case_two) where P is the largest prime of q and case_two says P > 2 and q | phi(P^(e_P+1))."""
    big_p, e_p = factorize(q).entries[-1]
    case_two = big_p > 2 and (big_p**e_p * (big_p - 1)) % q == 0
    return big_p, e_p, case_two


def divides_lambda_star_criterion(q: int, f) -> bool:
    """Congruence test equivalent to q | lambda*(n), for even q >= 4.

    n must be 2^e * m with e <= 1 and every prime of m congruent to 1 mod q.
    When the largest prime P of q is odd and q | phi(P^(e_P+1)), a factor
    P^v with v = 0 or v >= e_P + 1 is also allowed. Powers of two q fall under
    the first form.
    """
    if q < 4 or q % 2:
        raise DomainError("divides_lambda_star_criterion needs even q >= 4")
    f = as_factorization(f)
    big_p, e_p, case_two = _largest_prime_data(q)
    for p, v in f:
        if p == 2:
            if v > 1:
                return False
        elif case_two and p == big_p:
            if v < e_p + 1:
                return False
        elif p % q != 1:
            return False
    return True


def ceil_log(q: int, ell: int) -> int:
    """Smallest c >= 0 with ell^c >= q (exact integer version of ceil(log q / log ell))."""
    c, power = 0, 1
    while power < q:
        power *= ell
        c += 1
    return c


def _primes_below(q: int) -> list[int]:
    return [ell for ell in range(2, q) if prime_power_base(ell) == ell]


def _require_prime_power(q: int, least: int) -> None:
    if q < least or prime_power_base(q) is None:
        raise DomainError(f"q={q} must be a prime power >= {least}")


@lru_cache(maxsize=None)
def _floor_moduli(q: int) -> tuple[tuple[int, int], ...]:
    _require_prime_power(q, 3)
    return tuple((ell, ell ** ceil_log(q, ell)) for ell in _primes_below(q))


def primary_floor_criterion(q: int, f) -> bool:
    """Congruence test equivalent to lambda'(n) >= q, for prime powers q >= 3.

    n must be 2^e * m with e <= 1, and every odd prime p | m must satisfy, for
    each prime ell < q, either ell does not divide p - 1 or p = 1 mod ell^c
    with c the least exponent such that ell^c >= q.
    """
    moduli = _floor_moduli(q)
    f = as_factorization(f)
    for p, v in f:
        if p == 2:
            if v > 1:
                return False
            continue
        for ell, mod in moduli:
            if (p - 1) % ell == 0 and p % mod != 1:
                return False
    return True


def bq(q: int) -> Fraction:
    """Density exponent B(q) as an exact rational."""
    if q == 2:
        return Fraction(1)
    _require_prime_power(q, 2)
    out = Fraction(1)
    for ell in _primes_below(q):
        c = ceil_log(q, ell)
        out *= Fraction(ell - 2, ell - 1) + Fraction(1, (ell - 1) * ell ** (c - 1))
    return out


def modulus_Q(q: int) -> int:
    """Q = product over primes ell < q of ell^c(ell)."""
    _require_prime_power(q, 2)
    return math.prod(ell ** ceil_log(q, ell) for ell in _primes_below(q))


def residue_set_BQ(q: int, capacity: int = Q_CAPACITY_DEFAULT) -> np.ndarray:
    """Sorted residues b mod Q, coprime to Q, allowed by the lambda' >= q condition.

    The condition splits over the prime powers ell^c || Q: b = 1 mod ell^c, or b mod
    ell lies in {2, ..., ell-1}. The local sets are glued by the CRT.
    """
    big_q = modulus_Q(q)
    if big_q > capacity:
        raise CapacityError(f"Q={big_q} exceeds capacity {capacity}")
    residues = np.zeros(1, dtype=np.int64)
    modulus = 1
    for ell in _primes_below(q):
        mod = ell ** ceil_log(q, ell)
        local = np.arange(mod, dtype=np.int64)
        keep = (local % mod == 1) | (local % ell >= 2)
        local = local[keep]
        # CRT: x = residues (mod modulus), x = local (mod mod).
        inv = pow(modulus, -1, mod)
        lifted = residues[:, None] + modulus * (((local[None, :] - residues[:, None]) * inv) % mod)
        residues = lifted.ravel()
        modulus *= mod
    return np.sort(residues % big_q)


def bq_from_residues(q: int) -> Fraction:
    """|B_Q| / phi(Q), the enumerative counterpart of :func:`bq`."""
    return Fraction(len(residue_set_BQ(q)), euler_phi(modulus_Q(q)))
