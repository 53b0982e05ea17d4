import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lsdlab.arith import euler_phi, factorize, next_prime_power
from lsdlab.errors import DomainError
from lsdlab.unitgroup import (INFINITY, PrimaryDecomposition, bq, bq_from_residues, carmichael_lambda,
                              ceil_log, divides, divides_lambda_star_criterion, invariant_factors,
                              lambda_prime, lambda_star, modulus_Q, primary_floor_criterion,
                              residue_set_BQ, unit_group_primary)


def _element_orders(n):
    units = [a for a in range(1, n + 1) if math.gcd(a, n) == 1]
    out = []
    for a in units:
        k, x = 1, a % n
        while x != 1 % n:
            x = x * a % n
            k += 1
        out.append(k)
    return sorted(out)


def _orders_of_abelian(orders):
    """Orders of all elements of the product of cyclic groups Z/m."""
    out = []
    for e in product(*(range(m) for m in orders)):
        out.append(math.lcm(*(m // math.gcd(m, x) for m, x in zip(orders, e))) if orders else 1)
    return sorted(out)


@pytest.mark.parametrize("n", list(range(1, 60)) + [64, 72, 100, 105])
def test_primary_decomposition_matches_brute_force(n):
    # finite abelian groups are determined by their element-order statistics
    pd = unit_group_primary(n)
    assert math.prod(pd.orders) == euler_phi(n)
    assert _orders_of_abelian(pd.orders) == _element_orders(n)


def test_examples():
    assert unit_group_primary(15).orders == (2, 4)
    assert unit_group_primary(7).orders == (2, 3)
    assert unit_group_primary(2).orders == ()
    assert invariant_factors(PrimaryDecomposition((2, 4))).factors == (2, 4)
    assert invariant_factors(PrimaryDecomposition((2, 3))).factors == (6,)
    assert invariant_factors(PrimaryDecomposition((2, 2, 2))).factors == (2, 2, 2)
    assert lambda_star(7) == 6 and lambda_star(24) == 2 and lambda_star(2) == INFINITY
    assert lambda_prime(7) == 2 and lambda_prime(1) == INFINITY and lambda_prime(9) == 2
    assert carmichael_lambda(24) == 2 and carmichael_lambda(1) == 1


def test_invariant_factor_chain():
    for n in range(1, 10**5 + 1, 7):
        d = invariant_factors(unit_group_primary(n)).factors
        assert math.prod(d) == euler_phi(n)
        assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))


def test_lambda_star_even():
    for n in range(3, 10**5 + 1):
        assert lambda_star(n) % 2 == 0


def test_divides_infinity():
    assert divides(4, INFINITY)
    assert divides(3, 6) and not divides(4, 6)


def test_lambda_star_criterion_examples():
    assert divides_lambda_star_criterion(6, 9)
    assert divides_lambda_star_criterion(4, 25)
    assert not divides_lambda_star_criterion(4, 12)
    with pytest.raises(DomainError):
        divides_lambda_star_criterion(5, 7)


def test_primary_floor_examples():
    assert primary_floor_criterion(3, 2)
    assert primary_floor_criterion(3, 5)
    assert not primary_floor_criterion(3, 7)
    with pytest.raises(DomainError):
        primary_floor_criterion(6, 7)


@given(st.integers(1, 10**7), st.sampled_from([4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24, 30, 36]))
def test_lambda_star_criterion_property(n, q):
    assert divides_lambda_star_criterion(q, n) == divides(q, lambda_star(n))


@given(st.integers(1, 10**7), st.sampled_from([3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49]))
def test_primary_floor_property(n, q):
    assert primary_floor_criterion(q, n) == (lambda_prime(n) >= q)


def test_bq_examples():
    assert bq(3) == Fraction(1, 2)
    assert bq(5) == Fraction(1, 6)
    assert bq(2) == 1
    assert modulus_Q(3) == 4 and list(residue_set_BQ(3)) == [1]
    assert modulus_Q(5) == 72 and len(residue_set_BQ(5)) == 4
    assert modulus_Q(2) == 1 and list(residue_set_BQ(2)) == [0]


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9, 11])
def test_bq_matches_enumeration(q):
    assert bq_from_residues(q) == bq(q)
    big_q = modulus_Q(q)
    res = residue_set_BQ(q)
    assert all(math.gcd(int(b), big_q) == 1 for b in res)


@pytest.mark.parametrize("q", [3, 4, 5, 7])
def test_bq_residues_match_criterion(q):
    # a prime p > q is allowed exactly when its class mod Q lies in B_Q
    from lsdlab.arith import primes_up_to

    big_q = modulus_Q(q)
    allowed = set(int(b) for b in residue_set_BQ(q))
    for p in primes_up_to(5000):
        p = int(p)
        if big_q % p:
            assert primary_floor_criterion(q, p) == (p % big_q in allowed)


def test_bq_monotone():
    q = 2
    while next_prime_power(q) <= 64:
        assert bq(next_prime_power(q)) <= bq(q)
        q = next_prime_power(q)


def test_ceil_log_exact():
    assert ceil_log(8, 2) == 3 and ceil_log(9, 2) == 4 and ceil_log(9, 3) == 2 and ceil_log(1, 5) == 0
