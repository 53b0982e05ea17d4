import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsdlab.arith import (CACHE_MAGIC, Factorization, complex_gamma, digamma, euler_phi, factorize,
                          is_prime, least_prime_in_ap, load_spf_table, logarithmic_integral,
                          next_prime_power, prime_power_base, primes_up_to, save_spf_table,
                          sieve_spf, spf_table_for)
from lsdlab.errors import CapacityError, DomainError


def test_spf_small_tables():
    assert list(sieve_spf(10).spf[2:]) == [2, 3, 2, 5, 2, 7, 2, 3, 2]
    assert sieve_spf(2).spf[2] == 2


def test_spf_large_prime():
    table = sieve_spf(10**6)
    assert table.spf[999983] == 999983
    # trial-division oracle on a sample spanning several segments
    rng = np.random.default_rng(7)
    for n in rng.integers(2, 10**6, 500):
        n = int(n)
        divisors = [p for p in range(2, math.isqrt(n) + 1) if n % p == 0]
        assert table.spf[n] == (divisors[0] if divisors else n)


def test_spf_segment_boundaries():
    # a limit that crosses one segment boundary of the sieve
    limit = (1 << 22) + 1000
    table = sieve_spf(limit)
    for n in range((1 << 22) - 50, limit + 1):
        assert table.spf[n] == factorize(n).primes[0]


def test_spf_limits():
    with pytest.raises(CapacityError):
        sieve_spf(1)
    with pytest.raises(CapacityError):
        sieve_spf(10**4, max_limit=10**3)


def test_prime_counts():
    assert len(primes_up_to(10**4)) == 1229
    assert len(primes_up_to(10**6)) == 78498
    assert list(primes_up_to(30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(primes_up_to(1)) == 0


def test_cache_roundtrip(tmp_path):
    table = sieve_spf(5000)
    path = tmp_path / "spf.bin"
    save_spf_table(table, path)
    raw = path.read_bytes()
    assert raw[:8] == CACHE_MAGIC and len(raw) == 16 + 4 * 5001
    back = load_spf_table(path)
    assert back.limit == 5000 and np.array_equal(back.spf, table.spf)
    # a smaller request is served from the cache, a larger one re-sieves and rewrites
    assert spf_table_for(1000, path).limit == 5000
    assert spf_table_for(8000, path).limit == 8000
    assert load_spf_table(path).limit == 8000


def test_cache_rejects_garbage(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"notacache" * 3)
    with pytest.raises(DomainError):
        load_spf_table(path)


def test_factorize_examples():
    assert factorize(360).entries == ((2, 3), (3, 2), (5, 1))
    assert factorize(1).entries == ()
    assert factorize(999983).entries == ((999983, 1),)
    with pytest.raises(DomainError):
        factorize(0)


def test_factorize_table_matches_trial_division(spf_small):
    for n in range(1, 10**5 + 1):
        f = factorize(n, spf_small)
        assert f == factorize(n)
        assert f.n == n


def test_factorization_rejects_noncanonical():
    with pytest.raises(DomainError):
        Factorization(((3, 1), (2, 1)))
    with pytest.raises(DomainError):
        Factorization(((2, 0),))


def test_euler_phi_examples():
    assert euler_phi(12) == 4
    assert euler_phi(1) == 1
    assert euler_phi(72) == 24
    assert euler_phi(factorize(72)) == 24


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_euler_phi_multiplicative(a, b):
    if math.gcd(a, b) == 1:
        assert euler_phi(a * b) == euler_phi(a) * euler_phi(b)


@given(st.integers(1, 3000))
def test_euler_phi_counts_units(n):
    assert euler_phi(n) == sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1)


def test_logarithmic_integral():
    assert logarithmic_integral(2) == 0.0
    oracle = float(mpmath.quad(lambda t: 1 / mpmath.log(t), [2, 10]))
    assert abs(logarithmic_integral(10) - oracle) < 1e-9
    assert abs(logarithmic_integral(10) - 5.1204) < 1e-4
    y = 1e6
    oracle = float(mpmath.li(y) - mpmath.li(2))
    assert abs(logarithmic_integral(y) - oracle) < 1e-9 * oracle
    assert y / math.log(y) < logarithmic_integral(y) < 1.2 * y / math.log(y)
    with pytest.raises(DomainError):
        logarithmic_integral(1.5)


def test_prime_power_helpers():
    assert next_prime_power(7) == 8
    assert next_prime_power(8) == 9
    assert next_prime_power(13) == 16
    assert prime_power_base(81) == 3
    assert prime_power_base(12) is None
    assert prime_power_base(1) is None


def test_least_prime_in_ap():
    assert least_prime_in_ap(4, 1) == 5
    assert least_prime_in_ap(4, 3) == 3
    assert least_prime_in_ap(3, 2) == 2
    assert least_prime_in_ap(1, 0) == 2
    with pytest.raises(DomainError):
        least_prime_in_ap(4, 2)


def test_is_prime_against_sieve():
    primes = set(int(p) for p in primes_up_to(10**5))
    assert all(is_prime(n) == (n in primes) for n in range(10**5 + 1))
    assert is_prime(2**61 - 1) and not is_prime(2**61 + 1)


def test_special_functions():
    assert abs(digamma(1.0) + 0.5772156649015329) < 1e-12
    assert complex_gamma(1) == pytest.approx(1, rel=1e-12)
    assert complex_gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    with pytest.raises(DomainError):
        complex_gamma(-2)
    with pytest.raises(DomainError):
        digamma(0.0)


@settings(max_examples=200)
@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_gamma_recurrence(z):
    if min(abs(z - n) for n in range(-6, 1)) < 1e-3:
        return
    assert abs(complex_gamma(z + 1) - z * complex_gamma(z)) <= 1e-10 * abs(complex_gamma(z + 1))
