"""Statistical lower/upper bounds from M independent SAA replications.

Each replication solves the sampled problem on a fresh scenario draw and
records its optimal cost (``inf`` when the sampled problem is infeasible).
A replication returns a truly infeasible solution with probability at most
``1 - alpha``, so the number of such "bad" replications is dominated by
``Bin(M, 1 - alpha)``. Positions in the sorted cost list are then picked so
that, with confidence ``delta``,

    L = max{k : P(Bin(M, 1 - alpha) <= k - 1) <= (1 - delta) / 2}
    U = min{k : P(Bin(M, 1 - alpha) <= k)     >= (1 + delta) / 2}

and the costs at L and U bracket the true optimum.

Stochastic objectives give each cost a Student-t interval; overlapping
intervals are incomparable, and :func:`totalize_order` resolves the
resulting partial order.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .core import Problem, generate_scenarios, mix_seed, solve_saa
from .special import BinomialSpec, binom_cdf, check_probability, student_t_quantile

__all__ = [
    "InsufficientReplicationsError",
    "OrderIndices",
    "ReplicationOutcome",
    "Verdict",
    "BoundsReport",
    "Ordering",
    "IncreaseReplications",
    "order_statistic_indices",
    "run_replications",
    "compute_bounds",
    "compare_stochastic_costs",
    "position_is_determined",
    "totalize_order",
    "cost_interval",
]


class InsufficientReplicationsError(ValueError):
    """M too small for the requested confidence level."""


class OrderIndices(NamedTuple):
    l_index: int | None  # None: no valid L
    u_index: int


def order_statistic_indices(m: int, alpha: float, delta: float) -> OrderIndices:
    """1-based positions L and U in the sorted replication costs.

    ``l_index`` is ``None`` when no position qualifies for the lower bound.

    Raises
    ------
    InsufficientReplicationsError
        If no position ``U <= m`` reaches the upper-bound confidence.
    """
    if int(m) != m or m < 1:
        raise ValueError(f"M must be a positive integer, got {m}")
    alpha = check_probability(alpha, "alpha", open_=True)
    delta = check_probability(delta, "delta", open_=True)
    m = int(m)
    bad = BinomialSpec(m, 1.0 - alpha)
    lo_mass = (1.0 - delta) / 2.0
    hi_mass = (1.0 + delta) / 2.0

    l_index = None
    for k in range(1, m + 1):
        if binom_cdf(bad, k - 1) <= lo_mass:
            l_index = k
        else:
            break  # cdf nondecreasing in k

    u_index = None
    for k in range(1, m + 1):
        if binom_cdf(bad, k) >= hi_mass:
            u_index = k
            break
    if u_index is None:
        raise InsufficientReplicationsError(f"M too small: no U <= {m} at delta={delta:g}")
    return OrderIndices(l_index, u_index)


# ---------------------------------------------------------------------------
# replications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReplicationOutcome:
    index: int
    cost: float
    decision: tuple[float, ...] | None = None
    cost_interval: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if math.isinf(self.cost) != (self.decision is None):
            raise ValueError("cost is +inf exactly when no decision was found")

    @property
    def feasible(self) -> bool:
        return self.decision is not None


def _replicate(problem: Problem, n: int, theta: float, master_seed: int, index: int,
               objective_n: int, confidence: float) -> ReplicationOutcome:
    sets = [
        generate_scenarios(problem.distribution, n, mix_seed(master_seed, index, j))
        for j in range(len(problem.constraints))
    ]
    obj_set = None
    if problem.stochastic_objective:
        obj_set = generate_scenarios(
            problem.distribution, objective_n, mix_seed(master_seed, index, len(problem.constraints))
        )
    sol = solve_saa(problem, sets, theta, obj_set)
    if sol is None:
        return ReplicationOutcome(index, math.inf)
    interval = None
    if sol.cost_samples is not None:
        interval = cost_interval(sol.cost_samples, confidence)
    return ReplicationOutcome(index, sol.cost, tuple(float(v) for v in sol.decision), interval)


def run_replications(
    problem: Problem,
    plan,
    m: int,
    master_seed: int,
    *,
    theta: float | None = None,
    jobs: int = 1,
    objective_samples: int | None = None,
    cost_confidence: float = 0.95,
) -> list[ReplicationOutcome]:
    """Solve the sampled problem on ``m`` independent scenario draws.

    Replication ``i`` (1-based) draws the scenario set for constraint ``j``
    from seed ``mix_seed(master_seed, i, j)``, so the outcome list depends
    only on the arguments and not on ``jobs`` or scheduling.

    ``plan`` supplies ``n_hat`` (and ``theta`` unless given explicitly).
    A stochastic objective is averaged over ``objective_samples`` scenarios
    (default ``n_hat``) and carries a Student-t interval at ``cost_confidence``.
    """
    if int(m) != m or m < 1:
        raise ValueError(f"M must be a positive integer, got {m}")
    n = int(plan.n_hat)
    if theta is None:
        theta = plan.theta
    objective_n = int(objective_samples or n)

    def one(i: int) -> ReplicationOutcome:
        return _replicate(problem, n, theta, master_seed, i, objective_n, cost_confidence)

    indices = range(1, int(m) + 1)
    if jobs <= 1:
        return [one(i) for i in indices]
    with ThreadPoolExecutor(max_workers=int(jobs)) as pool:
        outcomes = list(pool.map(one, indices))
    return sorted(outcomes, key=lambda o: o.index)


# ---------------------------------------------------------------------------
# bound reports
# ---------------------------------------------------------------------------


class Verdict(str, Enum):
    BOUNDS = "bounds"
    INFEASIBLE_AT_DELTA = "infeasible_at_delta"
    INCONCLUSIVE = "inconclusive"


def _json_cost(c: float):
    return "inf" if math.isinf(c) else c


@dataclass(frozen=True)
class BoundsReport:
    sorted_costs: tuple[float, ...]
    l_index: int
    u_index: int
    lower_bound: float
    upper_bound: float
    delta: float
    alpha: float
    verdict: Verdict
    sorted_outcomes: tuple[ReplicationOutcome, ...] = ()

    @property
    def m(self) -> int:
        return len(self.sorted_costs)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "alpha": self.alpha,
            "delta": self.delta,
            "l_index": self.l_index,
            "u_index": self.u_index,
            "lower_bound": _json_cost(self.lower_bound),
            "upper_bound": _json_cost(self.upper_bound),
            "verdict": self.verdict.value,
            "costs": [_json_cost(c) for c in self.sorted_costs],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _sort_key(o: ReplicationOutcome):
    return (math.isinf(o.cost), o.cost, o.index)


def compute_bounds(outcomes: Sequence[ReplicationOutcome], alpha: float, delta: float) -> BoundsReport:
    """Sort replication costs and read the bounds off positions L and U.

    Raises
    ------
    InsufficientReplicationsError
        If there are too few replications for a lower or upper position.
    """
    if not outcomes:
        raise ValueError("need at least one replication outcome")
    ordered = tuple(sorted(outcomes, key=_sort_key))
    l_index, u_index = order_statistic_indices(len(ordered), alpha, delta)
    if l_index is None:
        raise InsufficientReplicationsError(
            f"M too small: no valid L for M={len(ordered)}, alpha={alpha:g}, delta={delta:g}"
        )
    costs = tuple(float(o.cost) for o in ordered)
    lower, upper = costs[l_index - 1], costs[u_index - 1]
    if math.isinf(lower) and math.isinf(upper):
        verdict = Verdict.INFEASIBLE_AT_DELTA
    elif math.isinf(upper):
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.BOUNDS
    return BoundsReport(costs, l_index, u_index, lower, upper, float(delta), float(alpha), verdict, ordered)


# ---------------------------------------------------------------------------
# stochastic objectives
# ---------------------------------------------------------------------------


def cost_interval(samples, confidence: float) -> tuple[float, float]:
    """Student-t interval ``mean +/- t_{(1+c)/2, n-1} s / sqrt(n)``."""
    x = np.asarray(samples, dtype=float).reshape(-1)
    if x.size < 2:
        raise ValueError("a cost interval needs at least 2 samples")
    confidence = check_probability(confidence, "confidence", open_=True)
    mean = float(x.mean())
    half = student_t_quantile((1.0 + confidence) / 2.0, x.size - 1) * float(x.std(ddof=1)) / math.sqrt(x.size)
    return (mean - half, mean + half)


class Ordering(str, Enum):
    LESS = "less"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


def compare_stochastic_costs(a: ReplicationOutcome, b: ReplicationOutcome) -> Ordering:
    """Interval order: disjoint intervals compare, overlapping ones do not."""
    if a.cost_interval is None or b.cost_interval is None:
        raise ValueError("both outcomes must carry cost intervals")
    (alo, ahi), (blo, bhi) = a.cost_interval, b.cost_interval
    if ahi < blo:
        return Ordering.LESS
    if bhi < alo:
        return Ordering.GREATER
    return Ordering.INCOMPARABLE


def _comparable(a: ReplicationOutcome, b: ReplicationOutcome) -> bool:
    if not a.feasible or not b.feasible:
        return a.feasible != b.feasible
    return compare_stochastic_costs(a, b) is not Ordering.INCOMPARABLE


def position_is_determined(sorted_outcomes: Sequence[ReplicationOutcome], position: int) -> bool:
    """Whether the element at 1-based ``position`` is comparable to every other.

    Only then is its rank the same in every linear extension of the
    interval partial order.
    """
    target = sorted_outcomes[position - 1]
    return all(_comparable(target, o) for i, o in enumerate(sorted_outcomes) if i != position - 1)


@dataclass(frozen=True)
class IncreaseReplications:
    """Returned instead of an ordering: rerun with more replications."""

    current_m: int
    suggested_m: int


def totalize_order(
    outcomes: Sequence[ReplicationOutcome],
    strategy: str = "saa_objective",
    *,
    problem: Problem | None = None,
    evaluation_size: int | None = None,
    seed: int | None = None,
    confidence: float = 0.95,
) -> list[ReplicationOutcome] | IncreaseReplications:
    """Impose a total order on stochastic replication costs.

    ``saa_objective`` sorts by the sampled objective value, ties broken by the
    lexicographically smallest decision. ``simulate`` re-estimates every
    feasible solution's cost on one fresh common sample of ``evaluation_size``
    scenarios (drawn from ``seed``) and sorts by the re-estimate; the returned
    outcomes carry the new costs and intervals. ``increase_M`` asks the caller
    to run more replications.
    """
    def key(o: ReplicationOutcome):
        return (not o.feasible, o.cost, o.decision or (), o.index)

    if strategy == "saa_objective":
        return sorted(outcomes, key=key)
    if strategy == "increase_M":
        return IncreaseReplications(len(outcomes), 2 * len(outcomes))
    if strategy != "simulate":
        raise ValueError(f"unknown strategy {strategy!r}")
    if problem is None or evaluation_size is None or seed is None:
        raise ValueError("the simulate strategy needs problem, evaluation_size and seed")
    if not problem.stochastic_objective:
        raise ValueError("the simulate strategy applies to stochastic objectives")
    xi = generate_scenarios(problem.distribution, evaluation_size, seed).realizations
    revised = []
    for o in outcomes:
        if not o.feasible:
            revised.append(o)
            continue
        vals = problem.objective_samples(np.asarray(o.decision), xi)
        revised.append(replace(o, cost=float(vals.mean()), cost_interval=cost_interval(vals, confidence)))
    return sorted(revised, key=key)
