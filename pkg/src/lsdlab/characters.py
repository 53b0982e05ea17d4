"""Dirichlet characters modulo q and the exponent vectors built from them.

U_q is written as a product of cyclic groups with explicit generators
(a primitive root for each odd prime power, -1 and 5 for 2^k), glued by the
CRT. Every unit a gets an exponent tuple e(a), stored as a flat index into an
array of shape (m_1, ..., m_k). Character t sends a to
exp(2 pi i sum_i t_i e_i(a) / m_i); characters are flat-indexed the same way,
so the transforms sum_a chi_t(a) f(a) over all t at once are n-dimensional FFTs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import euler_phi, factorize
from .errors import CapacityError, DomainError

PHI_CAPACITY_DEFAULT = 10**7


def _is_primitive_root(g: int, p: int) -> bool:
    m = p - 1
    return all(pow(g, m // ell, p) != 1 for ell, _ in factorize(m))


def primitive_root(p: int, k: int = 1) -> int:
    """Smallest primitive root modulo the odd prime power p^k."""
    g = 2
    while not _is_primitive_root(g, p):
        g += 1
    if k >= 2 and pow(g, p - 1, p * p) == 1:
        g += p
    return g


@dataclass(frozen=True, eq=False)
class CharacterGroup:
    """Dual group of U_q with discrete-log tables.

    ``elements[i]`` is the residue with flat exponent index i, ``index[a]`` is the
    flat index of residue a (or -1 if gcd(a, q) > 1).
    """

    modulus: int
    orders: tuple[int, ...]
    generators: tuple[int, ...]
    elements: np.ndarray
    index: np.ndarray

    @property
    def phi(self) -> int:
        return len(self.elements)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.orders if self.orders else (1,)

    def exponents(self, a: int) -> tuple[int, ...]:
        i = int(self.index[a % self.modulus])
        if i < 0:
            raise DomainError(f"{a} is not a unit mod {self.modulus}")
        return tuple(int(x) for x in np.unravel_index(i, self.shape))

    def character(self, t) -> "Character":
        if isinstance(t, (int, np.integer)):
            t = tuple(int(x) for x in np.unravel_index(int(t), self.shape))
        return Character(self, tuple(t))

    def characters(self):
        for i in range(self.phi):
            yield self.character(i)

    def index_tuples(self) -> np.ndarray:
        """Character index tuples t for all flat indices, shape (phi, k)."""
        return np.stack(np.unravel_index(np.arange(self.phi), self.shape), axis=1)

    def conj_index(self) -> np.ndarray:
        """Flat index of the conjugate of each character."""
        t = self.index_tuples()
        neg = (-t) % np.array(self.shape)
        return np.ravel_multi_index(tuple(neg.T), self.shape)

    def angles(self, a: int) -> np.ndarray:
        """Angles (in turns, floats in [0,1)) of chi_t(a) for every character t."""
        e = np.array(self.exponents(a), dtype=np.int64)
        t = self.index_tuples()
        lcm = math.lcm(*self.shape)
        num = (t * (e * (lcm // np.array(self.shape)))).sum(axis=1) % lcm
        return num / lcm

    def values_at(self, a: int) -> np.ndarray:
        """chi_t(a) for every character t (zeros if a is not a unit)."""
        if self.index[a % self.modulus] < 0:
            return np.zeros(self.phi, dtype=complex)
        return np.exp(2j * np.pi * self.angles(a))

    def parities(self) -> np.ndarray:
        """chi_t(-1) for every character, as +1 or -1."""
        return np.rint(self.values_at(self.modulus - 1).real).astype(int)

    def transform(self, f: np.ndarray) -> np.ndarray:
        """F[t] = sum over units a of chi_t(a) f[a], with f given in flat element order."""
        f = np.asarray(f).reshape(f.shape[:-1] + self.shape)
        axes = tuple(range(-len(self.shape), 0))
        out = np.fft.ifftn(f, axes=axes) * self.phi
        return out.reshape(out.shape[: -len(self.shape)] + (self.phi,))

    def conj_transform(self, f: np.ndarray) -> np.ndarray:
        """F[t] = sum over units a of conj(chi_t(a)) f[a]."""
        f = np.asarray(f).reshape(f.shape[:-1] + self.shape)
        axes = tuple(range(-len(self.shape), 0))
        out = np.fft.fftn(f, axes=axes)
        return out.reshape(out.shape[: -len(self.shape)] + (self.phi,))

    def table(self) -> np.ndarray:
        """Character table T[t, i] = chi_t(elements[i]); only sensible for small q."""
        t = self.index_tuples()
        e = t  # element exponent tuples are enumerated in the same flat order
        frac = (t[:, None, :] * e[None, :, :] / np.array(self.shape)).sum(axis=2)
        return np.exp(2j * np.pi * frac)


@dataclass(frozen=True)
class Character:
    """One Dirichlet character, identified by its index tuple."""

    group: CharacterGroup
    t: tuple[int, ...]

    @property
    def flat(self) -> int:
        return int(np.ravel_multi_index(self.t, self.group.shape)) if self.t else 0

    @property
    def is_principal(self) -> bool:
        return not any(self.t)

    @property
    def parity(self) -> int:
        return int(round(self(-1).real))

    @property
    def order(self) -> int:
        return math.lcm(*(m // math.gcd(m, ti) for m, ti in zip(self.group.shape, self.t))) if self.t else 1

    def conjugate(self) -> "Character":
        return Character(self.group, tuple((-ti) % m for ti, m in zip(self.t, self.group.shape)))

    def angle(self, a: int) -> Fraction | None:
        """chi(a) = exp(2 pi i * angle); None when gcd(a, q) > 1."""
        if self.group.index[a % self.group.modulus] < 0:
            return None
        e = self.group.exponents(a)
        return sum((Fraction(ti * ei, m) for ti, ei, m in zip(self.t, e, self.group.shape)), Fraction(0)) % 1

    def __call__(self, a: int) -> complex:
        ang = self.angle(a)
        if ang is None:
            return 0j
        return complex(np.exp(2j * np.pi * float(ang)))

    def values(self) -> np.ndarray:
        """chi(a) for a = 0, ..., q-1."""
        out = np.zeros(self.group.modulus, dtype=complex)
        g = self.group
        e = np.stack(np.unravel_index(np.arange(g.phi), g.shape), axis=1)
        frac = (e * np.array(self.t) / np.array(g.shape)).sum(axis=1)
        out[g.elements] = np.exp(2j * np.pi * frac)
        return out


def _components(q: int):
    """(generator mod q, order) for each cyclic factor of U_q."""
    comps = []
    for p, k in factorize(q):
        pk = p**k
        rest = q // pk
        local = []
        if p == 2:
            if k == 2:
                local = [(3, 2)]
            elif k >= 3:
                local = [(pk - 1, 2), (5, 2 ** (k - 2))]
        else:
            local = [(primitive_root(p, k), pk - pk // p)]
        for g, m in local:
            # Lift g mod p^k to a residue mod q that is 1 mod the rest of q.
            lifted = g if rest == 1 else (g * rest * pow(rest, -1, pk) + pk * pow(pk, -1, rest)) % q
            comps.append((lifted, m))
    return comps


@lru_cache(maxsize=32)
def build_character_group(q: int, capacity: int = PHI_CAPACITY_DEFAULT) -> CharacterGroup:
    """Character group mod q from explicit generators of U_q."""
    q = int(q)
    if q < 1:
        raise DomainError("modulus must be >= 1")
    if euler_phi(q) > capacity:
        raise CapacityError(f"phi({q}) exceeds capacity {capacity}")
    comps = _components(q)
    elements = np.array([1 % q], dtype=np.int64)
    for g, m in comps:
        powers = np.empty(m, dtype=np.int64)
        powers[0] = 1
        for i in range(1, m):
            powers[i] = powers[i - 1] * g % q
        elements = (elements[:, None] * powers[None, :] % q).ravel()
    index = np.full(q, -1, dtype=np.int64)
    index[elements] = np.arange(len(elements))
    if len(np.unique(elements)) != euler_phi(q):
        raise AssertionError(f"generators of U_{q} do not give an isomorphism")
    elements.setflags(write=False)
    index.setflags(write=False)
    return CharacterGroup(q, tuple(m for _, m in comps), tuple(g for g, _ in comps), elements, index)


@dataclass(frozen=True, eq=False)
class ExponentVector:
    """Complex exponents alpha_chi in flat character order, with the correlation bound lambda_q."""

    group: CharacterGroup
    alpha: np.ndarray
    lam: float

    @property
    def alpha0(self) -> complex:
        return complex(self.alpha[0])


def _correlations(group: CharacterGroup, alpha: np.ndarray) -> np.ndarray:
    """sum over chi of alpha_chi chi(a), for every unit a in flat element order."""
    # sum_t alpha_t exp(2 pi i t.e / m) is the same transform with roles swapped.
    return group.transform(alpha)


def lambda_q(v: ExponentVector) -> float:
    """1 + max over units a of |sum_chi alpha_chi chi(a)|."""
    return 1.0 + float(np.max(np.abs(_correlations(v.group, v.alpha))))


def _vector(group: CharacterGroup, alpha: np.ndarray) -> ExponentVector:
    alpha.setflags(write=False)
    lam = 1.0 + float(np.max(np.abs(_correlations(group, alpha))))
    return ExponentVector(group, alpha, lam)


def residue_indicator(group: CharacterGroup, residues) -> np.ndarray:
    """Indicator of a residue set in flat element order; rejects non-units."""
    ind = np.zeros(group.phi)
    for b in residues:
        i = group.index[int(b) % group.modulus]
        if i < 0:
            raise DomainError(f"{b} is not coprime to {group.modulus}")
        ind[i] = 1.0
    return ind


def exponents_restricted(group: CharacterGroup, residues) -> ExponentVector:
    """alpha_chi = phi(q)^-1 sum over b in A of conj(chi(b))."""
    ind = residue_indicator(group, residues)
    return _vector(group, group.conj_transform(ind) / group.phi)


def exponents_sathe(group: CharacterGroup, z: complex, a: int) -> ExponentVector:
    """alpha_chi = [chi principal] + (z-1) conj(chi(a)) / phi(q)."""
    if group.index[a % group.modulus] < 0:
        raise DomainError(f"gcd({a}, {group.modulus}) != 1")
    alpha = (complex(z) - 1) * np.conj(group.values_at(a)) / group.phi
    alpha[0] += 1.0
    return _vector(group, alpha)
