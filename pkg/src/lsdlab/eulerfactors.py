"""Convergent prime sums and products behind the correction factors.

Two families are needed:

* sums over prime powers p^r with r >= 2, which converge absolutely near
  s = 1. Their dependence on s is carried as a Taylor series in (s - 1), so the
  same truncated object serves both the value at s = 1 and the Cauchy circles
  used for higher coefficients;
* products over primes in one residue class, evaluated for many z at once.
  Small primes are multiplied directly; for the rest the logarithm is expanded
  in powers of 1/p and the per-class power sums sum p^-m are precomputed once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import cached_primes, euler_phi, factorize, least_prime_in_ap, primes_up_to
from .errors import CapacityError, DomainError
from .unitgroup import modulus_Q, residue_set_BQ

CUTOFF_DEFAULT = 10**7
K_DEFAULT = 4.0
EPS0_DEFAULT = 0.1
TAYLOR_DEGREE = 48
DIRECT_PRIME_LIMIT = 1000
POWER_SUM_ORDER = 24
DEVIATION_X_DEFAULT = 10**8
RECIPROCAL_CAPACITY = 2 * 10**8

# pi(x) <= 1.25506 x / log x for x > 1 (Rosser-Schoenfeld).
_PI_CONSTANT = 1.25506


@dataclass(frozen=True)
class TruncationPolicy:
    """Prime cutoff P for all truncated prime sums, with a generic tail bound.

    ``tail_bound`` bounds sum over p > P, r >= 2 of 1/(r p^r), the quantity
    dropped from every prime-power correction at s = 1.
    """

    cutoff: int = CUTOFF_DEFAULT

    @property
    def tail_bound(self) -> float:
        return prime_square_tail(self.cutoff, 1.0)


def prime_square_tail(cutoff: int, weight: float = 1.0, sigma: float = 1.0) -> float:
    """Bound for sum over p > P of weight * p^(-2 sigma) / (1 - p^-sigma).

    Partial summation with pi(t) <= 1.25506 t / log t gives
    sum_{p>P} p^-c <= 1.25506 c / ((c - 1) P^(c-1) log P) for c = 2 sigma > 1.
    """
    c = 2 * sigma
    base = _PI_CONSTANT * c / ((c - 1) * cutoff ** (c - 1) * math.log(cutoff))
    return weight * base / (1 - cutoff ** (-sigma))


def _residue_mask(modulus: int, residues) -> np.ndarray:
    mask = np.zeros(modulus, dtype=bool)
    for b in residues:
        b = int(b) % modulus
        if math.gcd(b, modulus) != 1:
            raise DomainError(f"{b} is not a unit mod {modulus}")
        mask[b] = True
    return mask


@lru_cache(maxsize=64)
def _correction_series(modulus: int, residues: tuple, cutoff: int, degree: int = TAYLOR_DEGREE) -> np.ndarray:
    """Taylor coefficients g_m of S(s) = sum_{p,r>=2} [p in A] - [p^r in A] over r p^(rs), about s = 1.

    S(s) = sum_m g_m (s - 1)^m, with p^(-rs) = p^-r exp(-r log p (s-1)).
    """
    mask = _residue_mask(modulus, residues)
    primes = cached_primes(cutoff)
    if modulus > 1:
        primes = primes[modulus % primes != 0]
    logs = np.log(primes.astype(float))
    base = primes % modulus
    in_a = mask[base]
    coef_list, expo_list = [], []
    power = base.copy()
    r = 2
    while True:
        alive = r * logs < 72  # p^-r above 1e-31; logs are increasing
        n_alive = int(np.count_nonzero(alive))
        if not n_alive:
            break
        logs, base, in_a, power = logs[:n_alive], base[:n_alive], in_a[:n_alive], power[:n_alive]
        power = power * base % modulus
        diff = (in_a.astype(float) - mask[power]) / r
        keep = diff != 0
        coef_list.append(diff[keep] * np.exp(-r * logs[keep]))
        expo_list.append(-r * logs[keep])
        r += 1
    g = np.zeros(degree + 1)
    if coef_list:
        w = np.concatenate(coef_list)
        x = np.concatenate(expo_list)
        term = w.copy()
        for m in range(degree + 1):
            g[m] = term.sum()
            term = term * x / (m + 1)
    g.setflags(write=False)
    return g


def correction_log(modulus: int, residues, s=1.0, policy: TruncationPolicy = TruncationPolicy()):
    """log of the prime-power correction factor at s (|s - 1| <= 0.2)."""
    s = np.asarray(s, dtype=complex)
    if np.any(np.abs(s - 1) > 0.2):
        raise DomainError("the Taylor form of the correction is used only for |s - 1| <= 0.2")
    key = tuple(sorted(int(b) % modulus for b in residues))
    g = _correction_series(modulus, key, policy.cutoff)
    return np.polyval(g[::-1], s - 1)


def prime_power_correction(q: int, residues, policy: TruncationPolicy = TruncationPolicy()) -> float:
    """exp(sum_{p,r>=2, p in A} 1/(r p^r) - sum_{p,r>=2, p^r in A} 1/(r p^r))."""
    return float(np.exp(correction_log(q, residues, 1.0, policy)).real)


def prime_power_correction_direct(q: int, residues, cutoff: int) -> float:
    """The same quantity by plain summation, used as an oracle."""
    mask = _residue_mask(q, residues)
    total = 0.0
    for p in primes_up_to(cutoff):
        p = int(p)
        if q % p == 0:
            continue
        r, pr = 2, p * p
        while pr < 10**40:
            total += (int(mask[p % q]) - int(mask[pr % q])) / (r * pr)
            r += 1
            pr *= p
    return math.exp(total)


# ---------------------------------------------------------------- lambda* and lambda' prefactors

def lambda_star_indicator(q: int) -> tuple[int, int, bool]:
    """(P, e_P, flag) where flag says P > 2 and q | phi(P^(e_P + 1))."""
    big_p, e_p = factorize(q).entries[-1]
    return big_p, e_p, big_p > 2 and (big_p**e_p * (big_p - 1)) % q == 0


def lambda_star_prefactor_log(q: int, s, policy: TruncationPolicy = TruncationPolicy()):
    """log of (1 + 2^-s) (1 + P^(-s e_P) / (P^s - 1))^flag times the correction for A = {1}."""
    s = np.asarray(s, dtype=complex)
    big_p, e_p, flag = lambda_star_indicator(q)
    out = np.log(1 + 2.0**-s)
    if flag:
        out = out + np.log(1 + big_p ** (-s * e_p) / (big_p**s - 1))
    return out + correction_log(q, [1], s, policy)


def g_lambda_star_one(q: int, policy: TruncationPolicy = TruncationPolicy()) -> float:
    """Correction factor for the q | lambda*(n) count, at s = 1."""
    if q < 4 or q % 2:
        raise DomainError("g_lambda_star_one needs even q >= 4")
    return float(np.exp(lambda_star_prefactor_log(q, 1.0, policy)).real)


def primary_prefactor_log(q: int, s, policy: TruncationPolicy = TruncationPolicy()):
    """log of (1 + 2^-s)(1 - 2^-s)^[2 in B_Q] times the correction over B_Q mod Q."""
    s = np.asarray(s, dtype=complex)
    big_q = modulus_Q(q)
    residues = residue_set_BQ(q)
    out = np.log(1 + 2.0**-s)
    if (2 % big_q) in set(int(b) for b in residues):
        out = out + np.log(1 - 2.0**-s)
    return out + correction_log(big_q, tuple(int(b) for b in residues), s, policy)


def g_primary_one(q: int, policy: TruncationPolicy = TruncationPolicy()) -> float:
    """Correction factor G_Q(1) for the lambda'(n) >= q count."""
    return float(np.exp(primary_prefactor_log(q, 1.0, policy)).real)


# ---------------------------------------------------------------- products over one residue class

@dataclass(frozen=True, eq=False)
class ClassSums:
    """Per-class data for products over primes p = a mod q up to the cutoff."""

    q: int
    a: int
    small: np.ndarray  # primes <= direct limit in the class
    power_sums: np.ndarray  # power_sums[m] = sum over larger primes in the class of p^-m
    higher: float  # sum_{p, r >= 2, p^r = a} 1/(r p^r)
    least_prime: int
    cutoff: int
    direct_limit: int


@lru_cache(maxsize=256)
def class_sums(q: int, a: int, cutoff: int = CUTOFF_DEFAULT, direct_limit: int = DIRECT_PRIME_LIMIT) -> ClassSums:
    if math.gcd(a, q) != 1:
        raise DomainError(f"gcd({a}, {q}) != 1")
    a %= q
    primes = cached_primes(cutoff)
    in_class = primes[primes % q == a] if q > 1 else primes
    small = in_class[in_class <= direct_limit]
    large = in_class[in_class > direct_limit].astype(float)
    sums = np.zeros(POWER_SUM_ORDER + 1)
    inv = 1.0 / large
    term = np.ones_like(inv)
    for m in range(1, POWER_SUM_ORDER + 1):
        term = term * inv
        sums[m] = term.sum()
    # prime powers p^r = a with r >= 2, any p
    coprime = primes[q % primes != 0] if q > 1 else primes
    logs = np.log(coprime.astype(float))
    base = coprime % q
    power = base.copy()
    higher = 0.0
    r = 2
    while True:
        n_alive = int(np.count_nonzero(r * logs < 72))
        if not n_alive:
            break
        logs, base, power = logs[:n_alive], base[:n_alive], power[:n_alive]
        power = power * base % q
        hit = power == a
        higher += float(np.sum(np.exp(-r * logs[hit]))) / r
        r += 1
    sums.setflags(write=False)
    return ClassSums(q, a, small, sums, higher, least_prime_in_ap(q, a), cutoff, direct_limit)


def _omega_log_product(z: np.ndarray, cs: ClassSums, tilde: bool) -> np.ndarray:
    """log of the class product (without the constant factors) for each z."""
    out = np.zeros_like(z)
    for p in cs.small:
        p = float(p)
        if tilde:
            out += -np.log(1 - z / p) + math.log(1 - 1 / p) + (1 - z) / p
        else:
            out += np.log(1 + (z - 1) / p) + (1 - z) / p
    w = z - 1
    for m in range(2, POWER_SUM_ORDER + 1):
        if tilde:
            out += (z**m - 1) * cs.power_sums[m] / m
        else:
            out += (-1) ** (m + 1) * w**m * cs.power_sums[m] / m
    return out


def _check_omega_domain(z, q, a, tilde, k_radius, eps0):
    radius = k_radius + (2 if tilde else 1)
    if tilde:
        radius = min(radius, least_prime_in_ap(q, a) * (1 - eps0 / 100))
    if np.any(np.abs(z) > radius + 1e-12):
        raise DomainError(f"|z| exceeds the admissible radius {radius:g}")


def _omega_value(z, q, a, tilde, policy, k_radius, eps0, s):
    z_arr = np.asarray(z, dtype=complex)
    _check_omega_domain(z_arr, q, a, tilde, k_radius, eps0)
    scale = math.log(q / euler_phi(q)) if s == 1.0 else float(
        sum(-np.log1p(-ell ** (-s)) for ell, _ in factorize(q)))
    if s == 1.0:
        cs = class_sums(q, a % q, policy.cutoff, max(DIRECT_PRIME_LIMIT, int(100 * (k_radius + 2))))
        # exp(0 * inf) can occur when z = 1 - p; keep the exact zero
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = (1 - z_arr) * cs.higher + scale + _omega_log_product(z_arr, cs, tilde)
        out = np.exp(logs)
    else:
        out = _omega_direct(z_arr, q, a, tilde, policy.cutoff, s) * math.exp(scale)
    return out[()] if out.ndim == 0 else out


def _omega_direct(z, q, a, tilde, cutoff, s):
    """Plain evaluation at real s: every prime and prime power up to the cutoff."""
    primes = cached_primes(cutoff)
    in_class = primes[primes % q == a % q] if q > 1 else primes
    ps = in_class.astype(float) ** (-s)
    zz = z[..., None]
    if tilde:
        factors = np.log(1 - 1 * ps) - np.log(1 - zz * ps) + (1 - zz) * ps
    else:
        factors = np.log(1 + (zz - 1) * ps) + (1 - zz) * ps
    total = factors.sum(axis=-1)
    coprime = primes[q % primes != 0] if q > 1 else primes
    higher = 0.0
    base = coprime % q
    power = base.copy()
    logs = np.log(coprime.astype(float))
    r = 2
    while r * s * logs[0] < 72:
        n_alive = int(np.count_nonzero(r * s * logs < 72))
        logs, base, power = logs[:n_alive], base[:n_alive], power[:n_alive]
        power = power * base % q
        hit = power == a % q
        higher += float(np.sum(np.exp(-r * s * logs[hit]))) / r
        r += 1
    return np.exp(total + (1 - z) * higher)


def g_omega_one(z, q: int, a: int, policy: TruncationPolicy = TruncationPolicy(),
                k_radius: float = K_DEFAULT, s: float = 1.0):
    """G_z(s) for the omega_a count: (1 - z) correction over prime powers, local Euler factors, class product.

    Vectorised over z. s = 1 uses the precomputed class sums; other real s use
    plain summation (slow, for validation).
    """
    return _omega_value(z, q, a, False, policy, k_radius, EPS0_DEFAULT, s)


def g_Omega_one(z, q: int, a: int, policy: TruncationPolicy = TruncationPolicy(),
                k_radius: float = K_DEFAULT, eps0: float = EPS0_DEFAULT, s: float = 1.0):
    """The Omega_a analogue with class product prod (1 - z/p)^-1 (1 - 1/p) e^((1-z)/p)."""
    return _omega_value(z, q, a, True, policy, k_radius, eps0, s)


def omega_tail_bound(z, policy: TruncationPolicy = TruncationPolicy(), tilde: bool = False) -> float:
    """Bound on |log error| of the class product and prime-power sums from truncation at P.

    For p > P: |log(1 + w/p) - w/p| <= |w|^2 / p^2 / (1 - |w|/p), summed over all p > P,
    plus |1 - z| times the dropped r >= 2 prime-power sum.
    """
    z = complex(z)
    w = abs(z) if tilde else abs(z - 1)
    w2 = abs(z) ** 2 + 1 if tilde else w * w
    big = policy.cutoff
    ratio = 1 - w / big
    if ratio <= 0:
        raise DomainError("cutoff too small for this z")
    main = w2 / ratio * _PI_CONSTANT * 2 / (big * math.log(big))
    return main + abs(1 - z) * policy.tail_bound


# ---------------------------------------------------------------- prime reciprocals

def restricted_prime_reciprocal(q: int, a: int, x: float) -> float:
    """sum_{p <= x, p = a mod q} 1/p."""
    if math.gcd(a, q) != 1:
        raise DomainError(f"gcd({a}, {q}) != 1")
    x = int(x)
    if x > RECIPROCAL_CAPACITY:
        raise CapacityError(f"x={x} exceeds {RECIPROCAL_CAPACITY}")
    primes = cached_primes(x)
    sel = primes[primes % q == a % q] if q > 1 else primes
    return float(np.sum(1.0 / sel[::-1]))


@dataclass(frozen=True)
class DeviationConstant:
    value: float
    band: float
    x: int


def deviation_constant(q: int, a: int, x: int = DEVIATION_X_DEFAULT) -> DeviationConstant:
    """sum_{p <= x, p = a} 1/p - log log x / phi(q) at x, with a spread-based uncertainty band.

    The band is the largest change of the same quantity over x/100 <= X <= x
    (evaluated at X = x/10 and x/100).
    """
    phi = euler_phi(q)
    primes = cached_primes(int(x))
    sel = primes[primes % q == a % q] if q > 1 else primes
    inv = 1.0 / sel.astype(float)
    cums = np.cumsum(inv)

    def at(limit):
        n = np.searchsorted(sel, limit, side="right")
        return float(cums[n - 1] if n else 0.0) - math.log(math.log(limit)) / phi

    value = at(x)
    band = max(abs(value - at(x // 10)), abs(value - at(x // 100)))
    return DeviationConstant(value, band, int(x))
