"""Quick invariant checks across all modules, run by ``lsdlab selftest``.

Each check is small enough that the whole battery finishes in well under a
minute; the exhaustive versions live in the test suite.
"""
from __future__ import annotations

import math
import traceback

import numpy as np


def _check_sieve():
    from .arith import factorize, primes_up_to, sieve_spf

    table = sieve_spf(10**4)
    for n in range(2, 10**4 + 1):
        if int(table.spf[n]) != factorize(n).primes[0]:
            return False, f"spf mismatch at {n}"
    return len(primes_up_to(10**4)) == 1229, ""


def _check_criteria():
    from .arith import factorize
    from .unitgroup import (divides_lambda_star_criterion, lambda_prime, lambda_star,
                            primary_floor_criterion)

    for n in range(1, 3001):
        f = factorize(n)
        star, prime = lambda_star(f), lambda_prime(f)
        for q in (4, 6, 8, 12):
            if divides_lambda_star_criterion(q, f) != (star % q == 0 if math.isfinite(star) else True):
                return False, f"lambda* criterion q={q} n={n}"
        for q in (3, 4, 5, 7):
            if primary_floor_criterion(q, f) != (prime >= q):
                return False, f"lambda' criterion q={q} n={n}"
    return True, ""


def _check_orthogonality():
    from .characters import build_character_group

    worst = 0.0
    for q in range(1, 31):
        table = build_character_group(q).table()
        gram = table @ table.conj().T / table.shape[1]
        worst = max(worst, float(np.abs(gram - np.eye(len(gram))).max()))
    return worst < 1e-10, f"max deviation {worst:.1e}"


def _check_l_values():
    from .characters import build_character_group
    from .lvalues import l_values_all, log_table

    group = build_character_group(4)
    ok = abs(l_values_all(group, 1.0)[1] - math.pi / 4) < 1e-10
    worst = 0.0
    for q in range(3, 21):
        g = build_character_group(q)
        vals = l_values_all(g, 1.0)[1:]
        logs = log_table(q).at_real(1.0)[1:]
        worst = max(worst, float(np.abs(np.exp(logs) / vals - 1).max()))
    return ok and worst < 1e-8, f"max |exp(T)/L - 1| {worst:.1e}"


def _check_correction():
    from .eulerfactors import TruncationPolicy, prime_power_correction, prime_power_correction_direct

    series = prime_power_correction(4, (1,), TruncationPolicy(10**4))
    direct = prime_power_correction_direct(4, (1,), 10**4)
    return abs(series - direct) < 1e-12, f"{series!r} vs {direct!r}"


def _check_counters():
    from .arith import factorize
    from .counters import Quantity, count_many
    from .unitgroup import lambda_star

    x = 3000
    quantity = Quantity("lambda_star_equal", 4)
    got = count_many([x], [quantity])[x][quantity]
    want = sum(1 for n in range(1, x + 1) if lambda_star(factorize(n)) == 4)
    return got == want, f"{got} vs {want}"


def _check_coefficients():
    from .predictors import RestrictedPrimes, leading_coefficient, series_coefficient

    desc = RestrictedPrimes(4, (1,))
    closed = float(leading_coefficient(desc))
    contour = series_coefficient(0, desc).real
    return abs(contour - closed) < 1e-8 * closed, f"{contour!r} vs {closed!r}"


def _check_local_law():
    from .predictors import c0_of_z, c0_tilde_of_z

    v, w = complex(c0_of_z(1.0, 3, 1)), complex(c0_tilde_of_z(1.0, 3, 1))
    return abs(v - 1) < 1e-10 and abs(w - 1) < 1e-10, f"C0(1)={v.real!r}"


CHECKS = (
    ("arith.sieve", _check_sieve),
    ("unitgroup.criteria", _check_criteria),
    ("characters.orthogonality", _check_orthogonality),
    ("lvalues.branch", _check_l_values),
    ("eulerfactors.correction", _check_correction),
    ("counters.lambda_star", _check_counters),
    ("predictors.leading_coefficient", _check_coefficients),
    ("predictors.local_law", _check_local_law),
)


def run_checks():
    """[(name, passed, detail)] for every check; exceptions count as failures."""
    results = []
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, "".join(traceback.format_exception_only(type(exc), exc)).strip()
        results.append((name, bool(ok), detail))
    return results
