"""Closed-form constants: unit-ball volumes, zeta values, Moebius sums."""

from __future__ import annotations

import math
from functools import lru_cache

from sympy import mobius


def unit_ball_volume(m: int) -> float:
    return math.pi ** (m / 2) / math.gamma(m / 2 + 1)


def log_unit_ball_volume(m: int) -> float:
    return (m / 2) * math.log(math.pi) - math.lgamma(m / 2 + 1)


@lru_cache(maxsize=None)
def zeta(m: int, tol: float = 1e-12) -> float:
    """Riemann zeta at an integer m >= 2 by direct summation.

    The tail after N terms is bracketed by int_{N+1}^inf x^-m dx and
    int_N^inf x^-m dx; the midpoint is returned once their width is below tol.
    """
    if m < 2:
        raise ValueError("zeta diverges for m < 2")
    # smallest N with N^{1-m}/(m-1) - (N+1)^{1-m}/(m-1) < tol, conservatively N^{-m} < tol
    n_terms = max(10, int(math.ceil(tol ** (-1.0 / m))) + 1)
    s = math.fsum(j ** (-m) for j in range(n_terms, 0, -1))
    upper_tail = n_terms ** (1 - m) / (m - 1)
    lower_tail = (n_terms + 1) ** (1 - m) / (m - 1)
    return s + 0.5 * (upper_tail + lower_tail)


def mobius_partial_sum(m: int, terms: int) -> float:
    """sum_{r <= terms} mu(r) / r^m; converges to 1/zeta(m)."""
    return math.fsum(int(mobius(r)) / r**m for r in range(1, terms + 1))


def mobius_tail_bound(m: int, terms: int) -> float:
    return terms ** (1 - m) / (m - 1)
