"""A-posteriori feasibility check of a candidate decision on a fresh sample.

The validator draws ``n_prime`` new scenarios per constraint, counts
successes and reports the one-sided Clopper-Pearson lower bound on the
satisfaction probability at confidence ``alpha_prime``. A constraint passes
when that bound reaches its ``beta``. No error tolerance is subtracted or
added here; the raw lower bound is reported.

The seed must not be one used while solving: reusing the solving sample
biases the check towards acceptance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .confidence import cp_lower_one_sided
from .core import ModelError, Problem, count_successes, generate_scenarios, mix_seed
from .special import check_probability

__all__ = ["ConstraintCheck", "ValidationReport", "validate"]


@dataclass(frozen=True)
class ConstraintCheck:
    label: str
    n: int
    successes: int
    p_lb: float
    beta: float

    @property
    def passed(self) -> bool:
        return self.p_lb >= self.beta

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "n": self.n,
            "successes": self.successes,
            "p_lb": self.p_lb,
            "beta": self.beta,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class ValidationReport:
    decision: tuple[float, ...]
    constraints: tuple[ConstraintCheck, ...]
    alpha: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.constraints)

    def to_dict(self) -> dict:
        return {
            "decision": [_plain_number(v) for v in self.decision],
            "constraints": [c.to_dict() for c in self.constraints],
            "pass": self.passed,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _plain_number(v: float):
    return int(v) if float(v).is_integer() else float(v)


def validate(decision, problem: Problem, n_prime: int, alpha_prime: float, seed: int) -> ValidationReport:
    """Re-check ``decision`` against ``n_prime`` fresh scenarios per constraint."""
    if int(n_prime) != n_prime or n_prime < 1:
        raise ModelError(f"n_prime must be a positive integer, got {n_prime}")
    alpha_prime = check_probability(alpha_prime, "alpha_prime", open_=True)
    x = np.atleast_1d(np.asarray(decision, dtype=float))
    if x.shape[0] != problem.decision_space.shape[1]:
        raise ModelError(f"decision has length {x.shape[0]}, expected {problem.decision_space.shape[1]}")
    checks = []
    for j, con in enumerate(problem.constraints):
        sset = generate_scenarios(problem.distribution, int(n_prime), mix_seed(seed, j))
        k = count_successes(x, con, sset)
        checks.append(ConstraintCheck(con.label, int(n_prime), k, cp_lower_one_sided(int(n_prime), k, alpha_prime), con.beta))
    return ValidationReport(tuple(float(v) for v in x), tuple(checks), alpha_prime)
