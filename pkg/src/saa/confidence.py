"""Clopper-Pearson exact binomial confidence intervals.

The endpoints are Beta quantiles:

    lower (two-sided)  = BetaInv((1 - alpha)/2, X, N - X + 1)
    upper (two-sided)  = BetaInv(1 - (1 - alpha)/2, X + 1, N - X)

and the one-sided bounds put the whole tail mass ``1 - alpha`` on one side.
``cp_lower_by_search`` / ``cp_upper_by_search`` evaluate the min/max-over-p
definitions directly by root-finding on binomial tails; they exist as an
independent route for cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .special import BinomialSpec, DomainError, binom_sf, check_probability, inv_reg_inc_beta

__all__ = [
    "Sided",
    "ConfidenceInterval",
    "cp_two_sided",
    "cp_lower_one_sided",
    "cp_upper_one_sided",
    "cp_lower_by_search",
    "cp_upper_by_search",
]


class Sided(str, Enum):
    TWO_SIDED = "two_sided"
    LOWER_ONE_SIDED = "lower_one_sided"
    UPPER_ONE_SIDED = "upper_one_sided"


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    confidence: float
    sided: Sided = Sided.TWO_SIDED

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")

    def __contains__(self, p: float) -> bool:
        return self.lower <= p <= self.upper


def _check_counts(n: int, x: int, alpha: float) -> tuple[int, int, float]:
    if int(n) != n or n < 1:
        raise DomainError(f"N must be a positive integer, got {n}")
    if int(x) != x or not 0 <= x <= n:
        raise DomainError(f"X must be an integer in [0, {n}], got {x}")
    alpha = check_probability(alpha, "alpha", open_=True)
    return int(n), int(x), alpha


def _lower(n: int, x: int, tail: float) -> float:
    if x == 0:
        return 0.0
    return inv_reg_inc_beta(tail, x, n - x + 1)


def _upper(n: int, x: int, tail: float) -> float:
    if x == n:
        return 1.0
    return inv_reg_inc_beta(1.0 - tail, x + 1, n - x)


def cp_two_sided(n: int, x: int, alpha: float) -> ConfidenceInterval:
    """Two-sided Clopper-Pearson interval at confidence ``alpha``."""
    n, x, alpha = _check_counts(n, x, alpha)
    tail = (1.0 - alpha) / 2.0
    return ConfidenceInterval(_lower(n, x, tail), _upper(n, x, tail), alpha, Sided.TWO_SIDED)


def cp_lower_one_sided(n: int, x: int, alpha: float) -> float:
    """Smallest p with P(Bin(n, p) >= x) >= 1 - alpha (0 when x == 0)."""
    n, x, alpha = _check_counts(n, x, alpha)
    return _lower(n, x, 1.0 - alpha)


def cp_upper_one_sided(n: int, x: int, alpha: float) -> float:
    """Largest p with P(Bin(n, p) <= x) >= 1 - alpha (1 when x == n)."""
    n, x, alpha = _check_counts(n, x, alpha)
    return _upper(n, x, 1.0 - alpha)


def _bisect_increasing(g, target: float, tol: float = 1e-14) -> float:
    # smallest p in [0, 1] with g(p) >= target, g nondecreasing
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def cp_lower_by_search(n: int, x: int, tail: float) -> float:
    """min{p : P(Bin(n, p) >= x) >= tail} by bisection on the binomial tail."""
    if x == 0:
        return 0.0
    return _bisect_increasing(lambda p: binom_sf(BinomialSpec(n, p), x), tail)


def cp_upper_by_search(n: int, x: int, tail: float) -> float:
    """max{p : P(Bin(n, p) <= x) >= tail} by bisection on the binomial CDF."""
    if x == n:
        return 1.0
    # P(Bin <= x) >= tail  <=>  P(Bin >= x + 1) <= 1 - tail
    return _bisect_increasing(lambda p: binom_sf(BinomialSpec(n, p), x + 1), 1.0 - tail)
