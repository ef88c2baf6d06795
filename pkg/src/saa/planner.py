"""A-priori sample sizing for the sampled problem and misclassification bands.

For a target satisfaction probability ``beta``, error tolerance ``theta`` and
confidence ``alpha``, the planner finds the smallest ``N`` such that the
one-sided Clopper-Pearson lower bound at ``X = ceil(N (beta + theta))``
successes reaches ``beta``. An assignment whose true satisfaction probability
is at most ``beta`` then reaches ``X`` sampled successes with probability at
most ``1 - alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Callable, Sequence

from .confidence import cp_lower_one_sided, cp_upper_one_sided
from .special import BinomialSpec, binom_cdf, binom_sf, check_probability

__all__ = [
    "PlanningError",
    "SamplePlan",
    "MultiPlan",
    "BandReport",
    "success_threshold",
    "plan_sample_size",
    "plan_multi_constraint",
    "classification_bands",
    "acceptance_probability",
    "rejection_probability",
]

DEFAULT_N_MAX = 10**6


class PlanningError(ValueError):
    """Raised when a sample plan cannot be produced."""


@dataclass(frozen=True)
class SamplePlan:
    n_hat: int
    success_threshold: int
    beta: float
    theta: float
    alpha: float
    p_lb_at_plan: float
    p_ub_at_plan: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MultiPlan:
    plans: tuple[SamplePlan, ...]
    n_hat: int

    def to_dict(self) -> dict:
        return {"plans": [p.to_dict() for p in self.plans], "n_hat": self.n_hat}


@dataclass(frozen=True)
class BandReport:
    """Satisfaction-probability cut points of the sampled acceptance rule.

    ``reject_band_upper`` (p_lb), ``midpoint`` (beta + theta) and
    ``accept_band_lower`` (p_ub), in probability units.
    """

    reject_band_upper: float
    midpoint: float
    accept_band_lower: float

    def __post_init__(self) -> None:
        if not self.reject_band_upper < self.midpoint < self.accept_band_lower:
            raise ValueError(f"bands out of order: {self}")

    def to_units(self, transform: Callable[[float], float]) -> tuple[float, float, float]:
        """Map the three cut points into decision units with a monotone map."""
        return (
            transform(self.reject_band_upper),
            transform(self.midpoint),
            transform(self.accept_band_lower),
        )

    def band_of(self, p: float) -> str:
        """Name the band containing satisfaction probability ``p``.

        Boundary points go to the lower (more conservative) band.
        """
        if p <= self.reject_band_upper:
            return "reject"
        if p <= self.midpoint:
            return "below_midpoint"
        if p <= self.accept_band_lower:
            return "above_midpoint"
        return "accept"

    def to_dict(self) -> dict:
        return asdict(self)


def _validate_targets(beta: float, theta: float, alpha: float) -> tuple[float, float, float]:
    beta = check_probability(beta, "beta", open_=True)
    alpha = check_probability(alpha, "alpha", open_=True)
    theta = float(theta)
    if not 0.0 < theta < 1.0 - beta:
        raise PlanningError(f"theta out of range: need 0 < theta < {1.0 - beta:g}, got {theta:g}")
    return beta, theta, alpha


def success_threshold(n: int, level: float) -> int:
    """ceil(n * level), keeping exact integers exact despite float noise."""
    raw = n * level
    nearest = round(raw)
    if abs(raw - nearest) <= 1e-9 * max(1.0, abs(raw)):
        return int(nearest)
    return math.ceil(raw)


def plan_sample_size(beta: float, theta: float, alpha: float, n_max: int = DEFAULT_N_MAX) -> SamplePlan:
    """Smallest N whose one-sided lower confidence bound clears ``beta``.

    A linear scan from N = 1: because of the ceiling in the success threshold
    the lower bound is not monotone in N, so bisection would be unsound.

    Raises
    ------
    PlanningError
        If ``theta`` is not in (0, 1 - beta) or no N <= ``n_max`` qualifies.
    """
    beta, theta, alpha = _validate_targets(beta, theta, alpha)
    if int(n_max) != n_max or n_max < 1:
        raise PlanningError(f"n_max must be a positive integer, got {n_max}")
    level = beta + theta
    tail = 1.0 - alpha
    for n in range(1, int(n_max) + 1):
        x = success_threshold(n, level)
        if x > n:
            continue
        # p_lb >= beta  <=>  P(Bin(n, beta) >= x) <= 1 - alpha  (tail increasing in p)
        if binom_sf(BinomialSpec(n, beta), x) > tail * (1.0 + 1e-12):
            continue
        p_lb = cp_lower_one_sided(n, x, alpha)
        if p_lb >= beta:
            return SamplePlan(
                n_hat=n,
                success_threshold=x,
                beta=beta,
                theta=theta,
                alpha=alpha,
                p_lb_at_plan=p_lb,
                p_ub_at_plan=cp_upper_one_sided(n, x, alpha),
            )
    raise PlanningError(f"n_max exceeded: no N <= {n_max} reaches p_lb >= {beta:g}")


def plan_multi_constraint(
    constraints: Sequence[tuple[float, float]], alpha: float, n_max: int = DEFAULT_N_MAX
) -> MultiPlan:
    """Plan each (beta_i, theta_i) separately and take the largest N."""
    if not constraints:
        raise PlanningError("at least one constraint is required")
    plans = tuple(plan_sample_size(b, t, alpha, n_max) for b, t in constraints)
    return MultiPlan(plans=plans, n_hat=max(p.n_hat for p in plans))


def classification_bands(plan: SamplePlan) -> BandReport:
    return BandReport(
        reject_band_upper=plan.p_lb_at_plan,
        midpoint=plan.beta + plan.theta,
        accept_band_lower=plan.p_ub_at_plan,
    )


def acceptance_probability(plan: SamplePlan, p_true: float) -> float:
    """P(at least X successes among N-hat Bernoulli(p_true) trials)."""
    p_true = check_probability(p_true, "p_true")
    return binom_sf(BinomialSpec(plan.n_hat, p_true), plan.success_threshold)


def rejection_probability(plan: SamplePlan, p_true: float) -> float:
    """P(fewer than X successes): the chance the sampled problem discards the assignment."""
    p_true = check_probability(p_true, "p_true")
    return binom_cdf(BinomialSpec(plan.n_hat, p_true), plan.success_threshold - 1)

