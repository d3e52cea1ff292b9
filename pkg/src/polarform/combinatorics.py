"""Index enumeration and counting for the signed blossom sums."""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb, factorial


def subsets(m: int, size: int):
    """Distinct index tuples ``i_1 < ... < i_size`` from ``range(m)``."""
    return itertools.combinations(range(m), size)


def multisets(n: int, size: int):
    """Non-decreasing index tuples ``j_1 <= ... <= j_size`` from ``range(n)``."""
    return itertools.combinations_with_replacement(range(n), size)


def multiset_count(n: int, size: int) -> int:
    if size < 0:
        return 0
    if n == 0:
        return 1 if size == 0 else 0
    return comb(n + size - 1, size)


def gen_binomial(k: int, d: int) -> Fraction:
    """Falling-factorial binomial ``k (k-1) ... (k-d+1) / d!``; valid for negative ``k``."""
    if d < 0:
        return Fraction(0)
    num = Fraction(1)
    for i in range(d):
        num *= k - i
    return num / factorial(d)


def signed_term_count(m: int, n: int, d: int) -> int:
    """Number of ``(alpha-subset, beta-multiset)`` pairs with ``alpha + beta = d``."""
    return sum(comb(m, a) * multiset_count(n, d - a) for a in range(0, min(m, d) + 1))
