"""Main terms of the asymptotic formulas and their coefficients.

Three counting problems share one shape. Their Dirichlet series equal
F(s) G(s) with F(s) = prod_chi L(s, chi)^alpha_chi and G holomorphic near
s = 1, so the count up to x is approximated by

    x (log x)^(alpha0 - 1) sum_j c_j / ((log x)^j Gamma(alpha0 - j)),

where c_j is the j-th Taylor coefficient at s = 1 of
Z(s) = F(s) G(s) (s - 1)^alpha0 / s. The coefficient c_0 has a closed form;
every c_j is also extracted numerically on a small circle around s = 1.

The local laws for omega_a and Omega_a use the analogous function C_0(z) of
the auxiliary variable z, whose Taylor coefficients against e^(zY/phi(q)) give
the polynomials P_{0,k} and Q_{0,k}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import euler_phi, least_prime_in_ap, logarithmic_integral, next_prime_power, rgamma
from .characters import build_character_group, exponents_restricted, exponents_sathe
from .errors import DomainError, ExtractionError, NumericValidationError, RangeError
from .eulerfactors import (EPS0_DEFAULT, K_DEFAULT, TruncationPolicy, correction_log,
                           g_Omega_one, g_omega_one, lambda_star_prefactor_log,
                           primary_prefactor_log)
from .lvalues import log_table
from .unitgroup import bq, modulus_Q, residue_set_BQ

RHO_DEFAULT = 0.05
NODES_DEFAULT = 512
Z_NODES_DEFAULT = 2048
N_MAX_DEFAULT = 3
DOUBLING_TOL = 1e-8
REAL_TOL = 1e-8


# ---------------------------------------------------------------- application descriptors

@dataclass(frozen=True)
class RestrictedPrimes:
    """Integers all of whose prime factors lie in the residue set A mod q."""

    q: int
    residues: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return self.q

    def exponents(self):
        return exponents_restricted(build_character_group(self.q), self.residues)

    def prefactor_log(self, s, policy):
        return correction_log(self.q, self.residues, s, policy)

    @property
    def label(self) -> str:
        return f"q={self.q};A={'|'.join(map(str, self.residues))}"


@dataclass(frozen=True)
class LambdaStarDivisible:
    """Integers n with q | lambda*(n), q even >= 4."""

    q: int

    def __post_init__(self):
        if self.q < 4 or self.q % 2:
            raise DomainError("needs even q >= 4")

    @property
    def modulus(self) -> int:
        return self.q

    def exponents(self):
        return exponents_restricted(build_character_group(self.q), (1,))

    def prefactor_log(self, s, policy):
        return lambda_star_prefactor_log(self.q, s, policy)

    @property
    def label(self) -> str:
        return f"q={self.q}"


@dataclass(frozen=True)
class PrimaryFloor:
    """Integers n with lambda'(n) >= q, q a prime power >= 3, via the modulus Q and set B_Q."""

    q: int

    @property
    def modulus(self) -> int:
        return modulus_Q(self.q)

    def exponents(self):
        return exponents_restricted(build_character_group(self.modulus), residue_set_BQ(self.q))

    def prefactor_log(self, s, policy):
        return primary_prefactor_log(self.q, s, policy)

    @property
    def label(self) -> str:
        return f"q={self.q}"


# ---------------------------------------------------------------- expansions

@dataclass(frozen=True)
class Expansion:
    """alpha0 and coefficients c_0..c_N of the main term."""

    alpha0: complex
    coefficients: tuple[complex, ...]
    N: int

    def terms(self, x: float) -> np.ndarray:
        """Individual terms x (log x)^(alpha0-1) c_j / ((log x)^j Gamma(alpha0 - j))."""
        log_x = math.log(x)
        j = np.arange(self.N + 1)
        c = np.array(self.coefficients[: self.N + 1], dtype=complex)
        return x * log_x ** (self.alpha0 - 1) * c * log_x ** (-j) * rgamma(self.alpha0 - j)

    def evaluate(self, x: float) -> float:
        value = complex(np.sum(self.terms(x)))
        if abs(value.imag) > REAL_TOL * max(1.0, abs(value)):
            raise NumericValidationError(f"prediction is not real: {value}")
        return value.real


def _real_positive(value: complex, what: str) -> float:
    if abs(value.imag) > REAL_TOL * abs(value) or value.real <= 0:
        raise NumericValidationError(f"{what} should be real and positive, got {value}")
    return value.real


def leading_log(desc, policy: TruncationPolicy = TruncationPolicy()) -> complex:
    """log c_0 = alpha0 log(phi/q) + sum_{chi != chi0} alpha_chi T(1, chi) + log G(1)."""
    vec = desc.exponents()
    logs = log_table(desc.modulus).at_real(1.0)
    total = vec.alpha0 * logs[0] + np.dot(vec.alpha[1:], logs[1:])
    return complex(total + desc.prefactor_log(1.0, policy))


def leading_coefficient(desc, policy: TruncationPolicy = TruncationPolicy()) -> float:
    return _real_positive(np.exp(leading_log(desc, policy)), "leading coefficient")


def k0(q: int, residues, policy: TruncationPolicy = TruncationPolicy()) -> float:
    """Leading coefficient for integers composed of primes from the residue set."""
    residues = tuple(sorted(int(b) % q for b in residues))
    if not residues:
        raise DomainError("the residue set must be nonempty")
    return leading_coefficient(RestrictedPrimes(q, residues), policy)


def r0(q: int, policy: TruncationPolicy = TruncationPolicy()) -> float:
    """Leading coefficient for the q | lambda*(n) count."""
    return leading_coefficient(LambdaStarDivisible(q), policy)


def kappa0(q: int, policy: TruncationPolicy = TruncationPolicy()) -> float:
    """Leading coefficient for the lambda'(n) >= q count (q = 2 counts every n: value 1)."""
    if q == 2:
        return 1.0
    return leading_coefficient(PrimaryFloor(q), policy)


def log_z_on_circle(desc, rho: float, nodes: int, policy: TruncationPolicy = TruncationPolicy()):
    """Nodes s_k on |s - 1| = rho and log Z(s_k)."""
    vec = desc.exponents()
    s, logs = log_table(desc.modulus).on_circle(rho, nodes)
    log_z = -np.log(s) + logs @ vec.alpha + desc.prefactor_log(s, policy)
    return s, log_z


def _cauchy(values: np.ndarray, offsets: np.ndarray, n_max: int) -> np.ndarray:
    """Trapezoid estimates of (2 pi i)^-1 integral f(s) (s - c)^(-j-1) ds for j = 0..n_max."""
    return np.array([np.mean(values * offsets ** (-j)) for j in range(n_max + 1)])


def series_coefficients(desc, n_max: int = N_MAX_DEFAULT, rho: float = RHO_DEFAULT,
                        nodes: int = NODES_DEFAULT,
                        policy: TruncationPolicy = TruncationPolicy()) -> np.ndarray:
    """c_0..c_{n_max} by the trapezoid rule on ``nodes`` points, checked against twice as many."""
    s, log_z = log_z_on_circle(desc, rho, 2 * nodes, policy)
    z = np.exp(log_z)
    offsets = s - 1
    fine = _cauchy(z, offsets, n_max)
    coarse = _cauchy(z[::2], offsets[::2], n_max)
    floor = 1e-14 * np.max(np.abs(z)) * rho ** (-np.arange(n_max + 1))
    gap = np.abs(fine - coarse)
    if np.any(gap > DOUBLING_TOL * np.abs(fine) + floor):
        raise ExtractionError(f"contour coefficients not converged: gaps {gap}")
    return coarse


def series_coefficient(j: int, desc, rho: float = RHO_DEFAULT, nodes: int = NODES_DEFAULT,
                       policy: TruncationPolicy = TruncationPolicy()) -> complex:
    if j < 0:
        raise DomainError("j must be >= 0")
    return complex(series_coefficients(desc, j, rho, nodes, policy)[j])


@lru_cache(maxsize=128)
def _expansion(desc, n: int, cutoff: int) -> Expansion:
    policy = TruncationPolicy(cutoff)
    vec = desc.exponents()
    closed = np.exp(leading_log(desc, policy))
    coeffs = [complex(closed)]
    if n >= 1:
        contour = series_coefficients(desc, n, policy=policy)
        if abs(contour[0] - closed) > DOUBLING_TOL * abs(closed):
            raise ExtractionError(
                f"contour c_0 = {contour[0]} disagrees with closed form {closed}")
        coeffs += [complex(c) for c in contour[1:]]
    return Expansion(vec.alpha0, tuple(coeffs), n)


def expansion_restricted(q: int, residues, N: int = 0, policy: TruncationPolicy = TruncationPolicy()) -> Expansion:
    residues = tuple(sorted(int(b) % q for b in residues))
    if not residues:
        raise DomainError("the residue set must be nonempty")
    return _expansion(RestrictedPrimes(q, residues), N, policy.cutoff)


def expansion_lambda_star(q: int, N: int = 0, policy: TruncationPolicy = TruncationPolicy()) -> Expansion:
    return _expansion(LambdaStarDivisible(q), N, policy.cutoff)


def expansion_primary(q: int, N: int = 0, policy: TruncationPolicy = TruncationPolicy()) -> Expansion:
    if q == 2:
        return Expansion(1.0 + 0j, (1.0 + 0j,) + (0j,) * N, N)
    return _expansion(PrimaryFloor(q), N, policy.cutoff)


def _check_x(x):
    if not x >= 4:
        raise DomainError("predictions need x >= 4")


def predict_restricted(x: float, q: int, residues, N: int = 0, policy: TruncationPolicy = TruncationPolicy()) -> float:
    _check_x(x)
    return expansion_restricted(q, residues, N, policy).evaluate(x)


def predict_lambda_star_divisible(x: float, q: int, N: int = 0, policy: TruncationPolicy = TruncationPolicy()) -> float:
    _check_x(x)
    return expansion_lambda_star(q, N, policy).evaluate(x)


def li_correction(x: float, q: int) -> float:
    """(li(x) + li(x/2)) / phi(q): the integers p and 2p with lambda* a proper multiple of q."""
    return (logarithmic_integral(x) + logarithmic_integral(max(x / 2, 2.0))) / euler_phi(q)


def predict_lambda_star_equal(x: float, q: int, N: int = 0, policy: TruncationPolicy = TruncationPolicy(),
                              with_li: bool = True) -> float:
    value = predict_lambda_star_divisible(x, q, N, policy)
    return value - li_correction(x, q) if with_li else value


def predict_primary_at_least(x: float, q: int, N: int = 0, policy: TruncationPolicy = TruncationPolicy()) -> float:
    _check_x(x)
    return expansion_primary(q, N, policy).evaluate(x)


def predict_lambda_prime_equal(x: float, q: int, N: int = 0, policy: TruncationPolicy = TruncationPolicy()) -> float:
    return predict_primary_at_least(x, q, N, policy) - predict_primary_at_least(x, next_prime_power(q), N, policy)


def density_exponent(q: int) -> float:
    """B(q) as a float, the exponent alpha0 of the lambda'(n) >= q count."""
    return float(bq(q))


# ---------------------------------------------------------------- local laws

@dataclass(frozen=True, eq=False)
class _SatheData:
    q: int
    a: int
    phi: int
    least_prime: int
    char_sum: complex  # sum_{chi != chi0} conj(chi(a)) T(1, chi)


@lru_cache(maxsize=256)
def _sathe_data(q: int, a: int) -> _SatheData:
    if math.gcd(a, q) != 1:
        raise DomainError(f"gcd({a}, {q}) != 1")
    group = build_character_group(q)
    phi = group.phi
    if phi > 1:
        logs = log_table(q).at_real(1.0)
        char_sum = complex(np.dot(np.conj(group.values_at(a))[1:], logs[1:]))
    else:
        char_sum = 0j
    return _SatheData(q, a % q, phi, least_prime_in_ap(q, a), char_sum)


def _c0(z, q, a, tilde, policy, k_radius, eps0):
    data = _sathe_data(q, a)
    z = np.asarray(z, dtype=complex)
    w = (z - 1) / data.phi
    if tilde:
        g = g_Omega_one(z, q, a, policy, k_radius, eps0)
    else:
        g = g_omega_one(z, q, a, policy, k_radius)
    out = rgamma(1 + w) * g * np.exp((1 + w) * math.log(data.phi / q) + w * data.char_sum)
    return out[()] if np.ndim(out) == 0 else out


def c0_of_z(z, q: int, a: int, policy: TruncationPolicy = TruncationPolicy(), k_radius: float = K_DEFAULT):
    """C_0(z) for the omega_a local law (vectorised over z)."""
    return _c0(z, q, a, False, policy, k_radius, EPS0_DEFAULT)


def c0_tilde_of_z(z, q: int, a: int, policy: TruncationPolicy = TruncationPolicy(),
                  k_radius: float = K_DEFAULT, eps0: float = EPS0_DEFAULT):
    """The Omega_a analogue of C_0(z)."""
    return _c0(z, q, a, True, policy, k_radius, eps0)


def c0_radial(z: complex, q: int, a: int, s: float = 1 + 1e-4, tilde: bool = False,
              policy: TruncationPolicy = TruncationPolicy()) -> complex:
    """The defining expression of C_0(z) evaluated at real s > 1 instead of the limit s -> 1.

    Gamma(1 + (z-1)/phi)^-1 G_z(s) / s * exp(sum_chi alpha_chi T(s, chi)) (s-1)^alpha0.
    """
    vec = exponents_sathe(build_character_group(q), z, a)
    logs = log_table(q).at_real(s)
    phi = vec.group.phi
    g = (g_Omega_one if tilde else g_omega_one)(z, q, a, policy, s=s)
    log_f = vec.alpha0 * logs[0] + np.dot(vec.alpha[1:], logs[1:])
    return complex(rgamma(1 + (z - 1) / phi) * g / s * np.exp(log_f))


@dataclass(frozen=True)
class LocalLawCoefficient:
    q: int
    a: int
    k: int
    Y: float
    value: float


def _z_contour(func, radius, Y, k, phi, nodes):
    def estimate(m):
        theta = 2 * math.pi * np.arange(m) / m
        z = radius * np.exp(1j * theta)
        vals = func(z) * np.exp(z * Y / phi) * z ** (-k)
        return np.mean(vals), np.max(np.abs(vals))

    fine, scale = estimate(2 * nodes)
    coarse, _ = estimate(nodes)
    if abs(fine - coarse) > DOUBLING_TOL * abs(fine) + 1e-15 * scale:
        raise ExtractionError(f"z-contour not converged ({abs(fine - coarse):.2e})")
    if abs(coarse.imag) > REAL_TOL * max(abs(coarse.real), 1e-300) + 1e-15 * scale:
        raise ExtractionError(f"z-contour value not real: {coarse}")
    return coarse.real


def _check_yk(Y, k):
    if not Y > 0 or k < 0:
        raise DomainError("needs Y > 0 and k >= 0")


def p0k(Y: float, k: int, q: int, a: int, k_radius: float = K_DEFAULT, nodes: int = Z_NODES_DEFAULT,
        policy: TruncationPolicy = TruncationPolicy()) -> float:
    """P_{0,k}(Y): k-th coefficient of C_0(z) e^(zY/phi) by a circle of radius K."""
    _check_yk(Y, k)
    phi = euler_phi(q)
    func = lambda z: c0_of_z(z, q, a, policy, k_radius)
    return _z_contour(func, k_radius, Y, k, phi, nodes)


def tilde_radius(q: int, a: int, k_radius: float = K_DEFAULT, eps0: float = EPS0_DEFAULT) -> float:
    return min(k_radius, (1 - eps0) * least_prime_in_ap(q, a))


def q0k(Y: float, k: int, q: int, a: int, k_radius: float = K_DEFAULT, eps0: float = EPS0_DEFAULT,
        nodes: int = Z_NODES_DEFAULT, policy: TruncationPolicy = TruncationPolicy()) -> float:
    """Q_{0,k}(Y): the Omega_a analogue, on the circle of radius min(K, (1 - eps0) p(q, a))."""
    _check_yk(Y, k)
    phi = euler_phi(q)
    func = lambda z: c0_tilde_of_z(z, q, a, policy, k_radius, eps0)
    return _z_contour(func, tilde_radius(q, a, k_radius, eps0), Y, k, phi, nodes)


def _poisson_weight(Y, k, phi):
    return math.exp(k * math.log(Y / phi) - math.lgamma(k + 1)) if k else 1.0


def p0k_saddle(Y: float, k: int, q: int, a: int, k_radius: float = K_DEFAULT,
               policy: TruncationPolicy = TruncationPolicy()) -> float:
    """(Y/phi)^k / k! * C_0(k phi / Y), valid for k <= K Y / phi."""
    _check_yk(Y, k)
    phi = euler_phi(q)
    if k > k_radius * Y / phi:
        raise RangeError(f"k={k} exceeds K Y / phi = {k_radius * Y / phi:.3g}")
    return _poisson_weight(Y, k, phi) * complex(c0_of_z(k * phi / Y, q, a, policy, k_radius)).real


def q0k_saddle(Y: float, k: int, q: int, a: int, k_radius: float = K_DEFAULT, eps0: float = EPS0_DEFAULT,
               policy: TruncationPolicy = TruncationPolicy()) -> float:
    """(Y/phi)^k / k! * C~_0(k phi / Y), valid for k <= R Y / phi."""
    _check_yk(Y, k)
    phi = euler_phi(q)
    radius = tilde_radius(q, a, k_radius, eps0)
    if k > radius * Y / phi:
        raise RangeError(f"k={k} exceeds R Y / phi = {radius * Y / phi:.3g}")
    return _poisson_weight(Y, k, phi) * complex(c0_tilde_of_z(k * phi / Y, q, a, policy, k_radius, eps0)).real


def q0k_regimes(Y: float, k: int, q: int, a: int, eps0: float = EPS0_DEFAULT) -> tuple[float, str]:
    """Main term of Q_{0,k} in the small-k or large-k regime, with a tag naming the regime."""
    _check_yk(Y, k)
    phi = euler_phi(q)
    p = least_prime_in_ap(q, a)
    pivot = p * Y / phi
    if k <= (1 - eps0) * pivot:
        return _poisson_weight(Y, k, phi) * (1 - 1 / p), "small-k"
    if k >= (1 + eps0) * pivot:
        return math.exp(pivot - k * math.log(p)) * (1 - 1 / p), "large-k"
    raise RangeError(f"k={k} lies in the excluded band around p Y / phi = {pivot:.3g}")


def predict_omega_hist(x: float, q: int, a: int, k: int, policy: TruncationPolicy = TruncationPolicy()) -> float:
    """x P_{0,k}(log log x) / (log x)^(1/phi(q))."""
    _check_x(x)
    log_x = math.log(x)
    return x * p0k(math.log(log_x), k, q, a, policy=policy) / log_x ** (1 / euler_phi(q))


def predict_Omega_hist(x: float, q: int, a: int, k: int, policy: TruncationPolicy = TruncationPolicy()) -> float:
    """x Q_{0,k}(log log x) / (log x)^(1/phi(q))."""
    _check_x(x)
    log_x = math.log(x)
    return x * q0k(math.log(log_x), k, q, a, policy=policy) / log_x ** (1 / euler_phi(q))
