import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsdlab.arith import factorize, next_prime_power, primes_up_to
from lsdlab.counters import (Histogram, Quantity, count_lambda_prime_at_least, count_lambda_prime_equal,
                             count_lambda_star_divisible, count_lambda_star_equal, count_many,
                             count_restricted, histogram_Omega_a, histogram_omega_a,
                             least_prime_power_part, lambda_star_values)
from lsdlab.errors import CapacityError, DomainError
from lsdlab.unitgroup import (divides, divides_lambda_star_criterion, lambda_prime, lambda_star,
                              primary_floor_criterion)

# the acceptance suite repeats these equivalences up to 2e5
X_LEMMA = 5 * 10**4
EVEN_Q = [4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24]
PRIME_POWER_Q = [3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32]


@pytest.fixture(scope="module")
def factorizations(spf_small):
    return [None] + [factorize(n, spf_small) for n in range(1, X_LEMMA + 1)]


@pytest.fixture(scope="module")
def streamed(spf_small):
    quantities = [Quantity("lambda_star_divisible", q) for q in EVEN_Q]
    quantities += [Quantity("lambda_prime_at_least", q) for q in PRIME_POWER_Q]
    return count_many([X_LEMMA], quantities, spf_small)[X_LEMMA]


def test_examples():
    assert count_restricted(30, 4, [1]) == 6
    assert count_restricted(10, 4, [1, 3]) == 5
    assert count_restricted(1000, 4, []) == 1
    assert histogram_omega_a(10, 4, 1).bins == {0: 8, 1: 2}
    assert histogram_Omega_a(25, 4, 1).bins[2] == 1  # only n = 25
    # q | lambda*(n) for n <= 30: 1, 2 and products of primes = 1 mod 4, times 1 or 2
    assert count_lambda_star_divisible(30, 4) == len([1, 2, 5, 10, 13, 17, 25, 26, 29])


def test_lambda_star_values_match_structure():
    values = lambda_star_values(5000)
    for n in range(1, 5001):
        assert values[n] == lambda_star(n)


def test_lambda_star_divisible_lemma_equivalence(factorizations, streamed):
    stars = [lambda_star(f) for f in factorizations[1:]]
    for q in EVEN_Q:
        by_structure = sum(divides(q, v) for v in stars)
        by_criterion = sum(divides_lambda_star_criterion(q, f) for f in factorizations[1:])
        assert by_structure == by_criterion == streamed[Quantity("lambda_star_divisible", q)]


def test_lambda_prime_lemma_equivalence(factorizations, streamed):
    primes_of = [lambda_prime(f) for f in factorizations[1:]]
    for q in PRIME_POWER_Q:
        by_structure = sum(v >= q for v in primes_of)
        by_criterion = sum(primary_floor_criterion(q, f) for f in factorizations[1:])
        assert by_structure == by_criterion == streamed[Quantity("lambda_prime_at_least", q)]


def test_equal_counts_against_per_n(factorizations):
    x = 20000
    assert x <= X_LEMMA
    stars = [lambda_star(f) for f in factorizations[1 : x + 1]]
    primes_of = [lambda_prime(f) for f in factorizations[1 : x + 1]]
    for q in (4, 6, 12):
        assert count_lambda_star_equal(x, q) == sum(v == q for v in stars)
    for q in (3, 4, 5, 8):
        assert count_lambda_prime_equal(x, q) == sum(q <= v < next_prime_power(q) for v in primes_of)
        assert count_lambda_prime_at_least(x, q) == sum(v >= q for v in primes_of)


def test_restricted_full_unit_set():
    x = 50000
    for q in (4, 9, 10, 12):
        units = [a for a in range(q) if math.gcd(a, q) == 1]
        direct = sum(1 for n in range(1, x + 1) if math.gcd(n, q) == 1)
        assert count_restricted(x, q, units) == direct


def test_Omega_first_moment():
    x = 10**6
    for q, a in ((3, 1), (4, 3), (10, 7)):
        hist = histogram_Omega_a(x, q, a)
        moment = sum(k * c for k, c in hist.bins.items())
        expected = 0
        for p in primes_up_to(x):
            p = int(p)
            if p % q != a:
                continue
            pr = p
            while pr <= x:
                expected += x // pr
                pr *= p
        assert moment == expected
        assert hist.total() == x


def test_omega_histogram_sums_to_x():
    hist = histogram_omega_a(12345, 7, 3)
    assert isinstance(hist, Histogram) and hist.total() == 12345


def test_many_checkpoints_match_single_passes():
    xs = [1000, 5000, 5001, 30000]
    quantity = Quantity("restricted", 3, (1,))
    many = count_many(xs, [quantity])
    for x in xs:
        assert many[x][quantity] == count_restricted(x, 3, [1])


def test_segments_do_not_change_counts():
    from lsdlab.counters import LambdaStarAcc, factor_pass

    results = []
    for segment in (1000, 1 << 22):
        acc = LambdaStarAcc()
        reducers = {"div4": (lambda L, acc=acc: int(np.count_nonzero(acc.g[:L] % 4 == 0)), lambda a, b: a + b)}
        results.append(factor_pass([25000], [acc], reducers, segment=segment)[25000]["div4"])
    assert results[0] == results[1] == count_lambda_star_divisible(25000, 4)


@settings(max_examples=60)
@given(st.lists(st.integers(2, 10**6), min_size=1, max_size=50), st.integers(3, 40))
def test_least_prime_power_part(values, cap):
    got = least_prime_power_part(np.array(values, dtype=np.int64), cap)
    for m, g in zip(values, got):
        parts = [p**e for p, e in factorize(m) if p < cap]
        assert g == min([cap] + parts)


def test_errors():
    with pytest.raises(DomainError):
        count_lambda_star_divisible(100, 5)
    with pytest.raises(DomainError):
        count_lambda_prime_at_least(100, 6)
    with pytest.raises(DomainError):
        count_restricted(100, 4, [2])
    with pytest.raises(CapacityError):
        count_many([10**9], [Quantity("restricted", 4, (1,))])
    with pytest.raises(DomainError):
        count_many([100], [Quantity("bogus", 4)])
