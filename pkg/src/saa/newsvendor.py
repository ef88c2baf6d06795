"""Single-period newsvendor under a non-stockout chance constraint.

Demand is Uniform(0, 200), the order quantity Q is an integer in 0..200 and
the cost of an order is Q itself. The constraint ``P(Q >= d) >= beta`` maps to
``G(Q, d) = Q - d >= 0``. Because the demand CDF is linear, the true
satisfaction probability of Q is ``Q / 200`` and the cheapest feasible order
is ``200 * beta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ChanceConstraint, DistributionSpec, Problem
from .special import check_probability

__all__ = [
    "DEMAND_HIGH",
    "NewsvendorModel",
    "analytic_min_feasible_q",
    "true_satisfaction",
    "newsvendor_problem",
]

DEMAND_HIGH = 200.0


def analytic_min_feasible_q(beta: float) -> float:
    """Smallest order quantity with P(Q >= d) >= beta under Uniform(0, 200)."""
    beta = check_probability(beta, "beta", open_=True)
    return DEMAND_HIGH * beta


def true_satisfaction(q: float) -> float:
    return min(1.0, max(0.0, float(q) / DEMAND_HIGH))


def _stock_margin(q: np.ndarray, demand: np.ndarray) -> np.ndarray:
    return q[0] - demand[:, 0]


def _stock_margin_batch(qs: np.ndarray, demand: np.ndarray) -> np.ndarray:
    return qs[:, :1] - demand[:, 0][None, :]


@dataclass(frozen=True)
class NewsvendorModel:
    beta: float = 0.5
    q_max: int = 200

    @property
    def demand(self) -> DistributionSpec:
        return DistributionSpec.uniform(0.0, DEMAND_HIGH)

    @property
    def q_domain(self) -> np.ndarray:
        return np.arange(self.q_max + 1)

    def is_truly_feasible(self, q: float) -> bool:
        # Q = 100 at beta = 0.5 counts as feasible: P(Q >= d) = 0.5 >= 0.5
        return true_satisfaction(q) >= self.beta

    def problem(self) -> Problem:
        constraint = ChanceConstraint(
            _stock_margin, self.beta, label="non-stockout", batch_mapping=_stock_margin_batch
        )
        return Problem(
            decision_space=self.q_domain,
            constraints=(constraint,),
            distribution=self.demand,
            objective=lambda q: float(q[0]),
            batch_objective=lambda qs: qs[:, 0].astype(float),
            name="newsvendor",
        )


def newsvendor_problem(beta: float = 0.5) -> Problem:
    return NewsvendorModel(beta=beta).problem()
