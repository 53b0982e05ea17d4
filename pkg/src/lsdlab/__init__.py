"""Exact counts and main-term predictions for multiplicative-group statistics of integers.

Modules: arith (sieves, factorization), unitgroup (structure of U_n),
characters (Dirichlet characters), lvalues (L-values and their logarithms),
eulerfactors (holomorphic correction factors), counters (exact counts),
predictors (asymptotic main terms) and cli.
"""

__version__ = "0.1.0"
