"""Dirichlet L-values and branch-consistent logarithms log L(s, chi).

L(s, chi) = q^-s sum_a chi(a) zeta(s, a/q) with the Hurwitz zeta function
evaluated by Euler-Maclaurin summation. The pole 1/(s-1) of zeta(s, a) is the
same for every a and cancels against sum_a chi(a) = 0, so the code works with
the regular part zeta(s, a) - 1/(s-1), which is entire in s. This makes s = 1
and complex s near 1 ordinary evaluation points.

The logarithm T(s, chi) is pinned at s = 2 by the prime sum
sum_{p,r} chi(p^r) / (r p^{2r}) and continued along a path by adding principal
logarithms of ratios of nearby values. Complex powers of L-values are always
formed as exp(sum alpha_chi T(s, chi)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .arith import cached_primes, factorize
from .characters import Character, CharacterGroup, build_character_group
from .errors import BranchError, ContinuationError, DomainError, NumericValidationError

EM_CUTOFF = 20
EM_TERMS = 10
START_PRIME_CUTOFF = 10**6
MAX_STEP = 0.01
BRANCH_LIMIT = math.pi / 2
_CHUNK_ELEMENTS = 1 << 16

_B2K = special.bernoulli(2 * 40)[2::2]  # B_2, B_4, ...


def _expm1_over(u):
    """(e^u - 1) / u, continuous at u = 0."""
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < 1e-6
    safe = np.where(small, 1.0, u)
    return np.where(small, 1 + u / 2 + u * u / 6, np.expm1(safe) / safe)


def hurwitz_zeta_regular(s, a, cutoff: int = EM_CUTOFF, terms: int = EM_TERMS):
    """zeta(s, a) - 1/(s - 1), an entire function of s, for a > 0.

    Broadcasts over s and a. Euler-Maclaurin: direct sum of (n+a)^-s for
    n < cutoff, integral term, half-term and ``terms`` Bernoulli corrections.
    """
    if terms < 8:
        raise DomainError("use at least 8 Euler-Maclaurin correction terms")
    s = np.asarray(s, dtype=complex)
    a = np.asarray(a, dtype=float)
    s_, a_ = np.broadcast_arrays(s, a)
    n = np.arange(cutoff, dtype=float)
    head = np.sum(np.exp(-s_[..., None] * np.log(a_[..., None] + n)), axis=-1)
    big = cutoff + a_
    log_big = np.log(big)
    # (big^(1-s) - 1)/(s-1) = -log(big) * expm1(u)/u with u = (1-s) log(big)
    integral = -log_big * _expm1_over((1 - s_) * log_big)
    power = np.exp(-s_ * log_big)  # big^-s
    total = head + integral + power / 2
    rising = s_.copy()  # s (s+1) ... (s+2k-2)
    factorial = 2.0
    term_power = power / big  # big^(-s-1)
    for k in range(1, terms + 1):
        total = total + _B2K[k - 1] / factorial * rising * term_power
        rising = rising * (s_ + 2 * k - 1) * (s_ + 2 * k)
        factorial *= (2 * k + 1) * (2 * k + 2)
        term_power = term_power / (big * big)
    return total


def hurwitz_zeta(s, a, cutoff: int = EM_CUTOFF, terms: int = EM_TERMS):
    """Hurwitz zeta(s, a) for s != 1."""
    s_arr = np.asarray(s, dtype=complex)
    if np.any(s_arr == 1):
        raise DomainError("Hurwitz zeta has a pole at s = 1")
    out = hurwitz_zeta_regular(s, a, cutoff, terms) + 1 / (s_arr - 1)
    if np.isrealobj(s) and np.isrealobj(a):
        out = out.real
    return out[()] if np.ndim(out) == 0 else out


def zeta_times_pole(s):
    """(s - 1) zeta(s), entire and equal to 1 at s = 1."""
    s = np.asarray(s, dtype=complex)
    return 1 + (s - 1) * hurwitz_zeta_regular(s, 1.0)


def l_value(s, chi: Character) -> complex:
    """L(s, chi) for a non-principal character by direct summation over residues."""
    if chi.is_principal:
        raise DomainError("principal character: use zeta(s) * prod (1 - l^-s)")
    g = chi.group
    q = g.modulus
    vals = chi.values()
    a = np.arange(1, q)
    mask = vals[1:] != 0
    z = hurwitz_zeta_regular(complex(s), a[mask] / q)
    return complex(np.exp(-complex(s) * math.log(q)) * np.sum(vals[1:][mask] * z))


def l_one_digamma(chi: Character) -> complex:
    """L(1, chi) = -(1/q) sum_a chi(a) psi(a/q)."""
    if chi.is_principal:
        raise DomainError("L(1, chi_0) is infinite")
    q = chi.group.modulus
    vals = chi.values()
    a = np.arange(1, q)
    return complex(-np.sum(vals[1:] * special.digamma(a / q)) / q)


def l_values_all(group: CharacterGroup, s) -> np.ndarray:
    """L(s, chi_t) for every character and every s in an array (shape s.shape + (phi,)).

    The principal entry holds (s-1) L(s, chi_0) = (s-1) zeta(s) prod_{l | q} (1 - l^-s),
    which is finite at s = 1.
    """
    s = np.asarray(s, dtype=complex)
    q = group.modulus
    a = group.elements.astype(float)
    a[a == 0] = q  # q = 1: the single residue class is a = q
    flat = s.reshape(-1)
    out = np.empty((flat.size, group.phi), dtype=complex)
    chunk = max(1, _CHUNK_ELEMENTS // group.phi)
    for i in range(0, flat.size, chunk):
        part = flat[i : i + chunk]
        z = hurwitz_zeta_regular(part[:, None], a / q)
        out[i : i + chunk] = group.transform(z) * np.exp(-part * math.log(q))[:, None]
    out[:, 0] = principal_pole_free(q, flat)
    return out.reshape(s.shape + (group.phi,))


def principal_pole_free(q: int, s):
    """(s-1) L(s, chi_0 mod q)."""
    s = np.asarray(s, dtype=complex)
    val = zeta_times_pole(s)
    for ell, _ in factorize(q):
        val = val * (1 - np.exp(-s * math.log(ell)))
    return val


def log_principal_star(q: int, s):
    """T*(s, chi_0) = log((s-1) L(s, chi_0)), principal branch (the argument stays near 1)."""
    s = np.asarray(s, dtype=complex)
    val = np.log(zeta_times_pole(s))
    for ell, _ in factorize(q):
        val = val + np.log(1 - np.exp(-s * math.log(ell)))
    return val


# ---------------------------------------------------------------- continuation

def prime_sum_at_two(group: CharacterGroup, cutoff: int = START_PRIME_CUTOFF) -> np.ndarray:
    """sum_{p <= cutoff, r >= 1} chi(p^r) / (r p^{2r}) for every character.

    Terms are bucketed by the residue of p^r, then one character transform
    gives all characters.
    """
    q = group.modulus
    primes = cached_primes(cutoff)
    primes = primes[q % primes != 0] if q > 1 else primes
    weights = np.zeros(group.phi)
    pr = primes % q
    base = pr.copy()
    inv_p2 = 1.0 / (primes.astype(float) ** 2)
    term = inv_p2.copy()
    r = 1
    while True:
        keep = term > 1e-300
        np.add.at(weights, group.index[pr[keep]], term[keep] / r)
        r += 1
        term = term * inv_p2
        if term.max(initial=0) < 1e-20:
            break
        pr = pr * base % q
    return group.transform(weights)


def prime_sum_tail_bound(cutoff: int = START_PRIME_CUTOFF) -> float:
    """Bound for the omitted part sum_{p > P} sum_r p^{-2r}/r <= sum_{n > P} 1/(n(n-1)) = 1/P."""
    return 1.0 / cutoff


def _step_logs(prev_vals, new_vals):
    """Principal log of new/prev, raising when any increment is too large or a value vanishes."""
    scale = np.maximum(np.abs(prev_vals), 1e-300)
    if np.any(np.abs(new_vals) < 1e-12 * np.maximum(scale, 1.0)):
        raise ContinuationError("L(s, chi) vanishes numerically on the continuation path")
    inc = np.log(new_vals / prev_vals)
    return inc


class LogLTable:
    """Branch-consistent logarithms T(s, chi) for every character of one group.

    Real-axis values are computed on demand by walking down from s = 2 and are
    memoised; the principal entry holds T*(s, chi_0) = log((s-1) L(s, chi_0)).
    """

    def __init__(self, group: CharacterGroup, start_cutoff: int = START_PRIME_CUTOFF,
                 max_step: float = MAX_STEP):
        self.group = group
        self.max_step = max_step
        self.start_cutoff = start_cutoff
        self._real: dict[float, np.ndarray] = {}
        self._start = None

    def start(self) -> np.ndarray:
        """T(2, chi) for all chi, branch fixed by the prime sum."""
        if self._start is None:
            vals = l_values_all(self.group, 2.0)
            logs = np.log(vals)
            prime = prime_sum_at_two(self.group, self.start_cutoff)
            turns = np.round((prime - logs).imag / (2 * math.pi))
            logs = logs + 2j * math.pi * turns
            gap = np.abs(logs - prime)
            gap[0] = 0.0
            if gap.max() > 2 * prime_sum_tail_bound(self.start_cutoff) + 1e-9:
                raise NumericValidationError(
                    f"prime sum and log L(2, chi) disagree by {gap.max():.3e}")
            logs[0] = log_principal_star(self.group.modulus, 2.0)
            self._start = logs
        return self._start

    def _walk(self, path: np.ndarray, logs: np.ndarray, depth: int = 0) -> np.ndarray:
        """Continue logs (valid at path[0]) along the points of path; returns logs at every point."""
        vals = l_values_all(self.group, path)
        out = np.empty((len(path), self.group.phi), dtype=complex)
        out[0] = logs
        for k in range(1, len(path)):
            inc = _step_logs(vals[k - 1], vals[k])
            inc[0] = 0
            if np.abs(inc).max() > BRANCH_LIMIT:
                if depth > 12:
                    raise BranchError("continuation step could not be refined below the branch limit")
                sub = np.linspace(path[k - 1], path[k], 3)
                out[k] = self._walk(sub, out[k - 1], depth + 1)[-1]
            else:
                out[k] = out[k - 1] + inc
        out[:, 0] = log_principal_star(self.group.modulus, path)
        return out

    def at_real(self, s: float) -> np.ndarray:
        """T(s, chi) for real s in (0.9, 2], all characters."""
        s = float(s)
        if not 0.9 < s <= 2.0:
            raise DomainError("real continuation is provided for s in (0.9, 2]")
        key = round(s, 14)
        if key not in self._real:
            steps = max(1, math.ceil((2.0 - s) / self.max_step - 1e-9))
            path = np.linspace(2.0, s, steps + 1)
            self._real[key] = self._walk(path.astype(complex), self.start())[-1]
        return self._real[key]

    def on_circle(self, rho: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
        """T on the circle |s - 1| = rho at ``nodes`` equally spaced points starting at 1 + rho.

        The logarithm is continued down the real axis to 1 + rho and then around
        the circle. Returning to the start must reproduce the starting value;
        a nonzero winding means L has a zero inside the circle.
        """
        theta = 2 * math.pi * np.arange(nodes + 1) / nodes
        path = 1 + rho * np.exp(1j * theta)
        logs = self._walk(path, self.at_real(1 + rho))
        closure = np.abs(logs[-1] - logs[0]).max()
        if closure > 1e-6:
            raise ContinuationError(
                f"log L(s, chi) does not close around |s-1|={rho} (gap {closure:.2e}); "
                "an L-function vanishes inside the circle")
        vals = l_values_all(self.group, path[:-1])
        if np.abs(vals).min() < 1e-10:
            raise ContinuationError("L(s, chi) vanishes numerically on the circle")
        return path[:-1], logs[:-1]


@lru_cache(maxsize=64)
def log_table(q: int) -> LogLTable:
    return LogLTable(build_character_group(q))


@dataclass(frozen=True)
class LogLValue:
    character: Character
    s: float
    value: complex


def log_l_continuous(chi: Character, s: float) -> LogLValue:
    """Continued logarithm T(s, chi); T*(s, chi_0) for the principal character."""
    table = log_table(chi.group.modulus)
    return LogLValue(chi, float(s), complex(table.at_real(s)[chi.flat]))


def log_l_one(q: int) -> np.ndarray:
    """T(1, chi) for all characters mod q (principal entry log(phi(q)/q))."""
    return log_table(q).at_real(1.0)


def product_l_one_nonprincipal(group: CharacterGroup) -> float:
    """prod over chi != chi_0 of L(1, chi), via exp of the summed logarithms."""
    if group.modulus < 3:
        raise DomainError("needs q >= 3")
    total = np.sum(log_table(group.modulus).at_real(1.0)[1:])
    value = np.exp(total)
    if abs(value.imag) > 1e-8 * max(1.0, abs(value)):
        raise NumericValidationError(f"product of L(1, chi) not real: {value}")
    return float(value.real)
