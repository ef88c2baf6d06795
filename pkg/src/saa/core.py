"""Scenario generation and the sampled (SAA) satisfaction/optimization problem.

Conventions
-----------
* Constraint mappings are oriented so that ``G(x, xi) >= 0`` means
  "satisfied"; a scenario counts as a success only if every component of
  ``G`` is nonnegative. Constraints written as ``G <= 0`` are wrapped with
  :meth:`ChanceConstraint.at_most`, which negates the mapping.
* The closed inequality is used for counting. For continuous ``xi`` this is
  indistinguishable from the strict one; for distributions with atoms the
  two can give different counts.
* Mappings are vectorized over scenarios: ``mapping(x, xi)`` receives one
  decision (1-D array) and an ``(N, d)`` scenario matrix and returns an
  ``(N,)`` or ``(N, m)`` array. An optional ``batch_mapping(X, xi)`` taking
  the whole ``(K, n)`` decision matrix and returning ``(K, N)`` or
  ``(K, N, m)`` lets the solver evaluate every decision in one call.
"""

from __future__ import annotations

import io
import math
import os
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .planner import success_threshold

__all__ = [
    "RNG_ALGORITHM",
    "ModelError",
    "mix_seed",
    "make_rng",
    "DistributionSpec",
    "ScenarioSet",
    "ChanceConstraint",
    "Problem",
    "SAASolution",
    "generate_scenarios",
    "count_successes",
    "satisfaction_rate",
    "is_saa_feasible",
    "solve_saa",
    "write_scenarios",
    "read_scenarios",
]

RNG_ALGORITHM = "philox4x64-10"
_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class ModelError(ValueError):
    """Invalid model, distribution or scenario data."""


def _splitmix64(z: int) -> int:
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(master_seed: int, *indices: int) -> int:
    """Derive a child seed by folding indices through the SplitMix64 finalizer.

    Each index is combined with the running state via XOR with a finalized
    value, never by adding offsets, so neighbouring masters do not produce
    overlapping child streams.
    """
    state = _splitmix64(int(master_seed) & _MASK64)
    for i in indices:
        state = _splitmix64(state ^ _splitmix64((int(i) * _GOLDEN) & _MASK64))
    return state


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator keyed directly by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & _MASK64))


# ---------------------------------------------------------------------------
# distributions and scenario sets
# ---------------------------------------------------------------------------

_KINDS = ("uniform", "normal", "exponential", "empirical")


@dataclass(frozen=True)
class DistributionSpec:
    """Distribution of the random vector; components are i.i.d. copies of ``kind``.

    ``params`` are ``(lo, hi)`` for uniform, ``(mean, std)`` for normal,
    ``(rate,)`` for exponential and the support values for empirical.
    """

    kind: str
    params: tuple[float, ...]
    dimension: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.kind not in _KINDS:
            raise ModelError(f"unknown distribution kind {self.kind!r}")
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ModelError(f"dimension must be a positive integer, got {self.dimension}")
        p = self.params
        if any(not math.isfinite(v) for v in p):
            raise ModelError("distribution parameters must be finite")
        if self.kind == "uniform" and not (len(p) == 2 and p[0] < p[1]):
            raise ModelError(f"uniform needs lo < hi, got {p}")
        if self.kind == "normal" and not (len(p) == 2 and p[1] > 0):
            raise ModelError(f"normal needs std > 0, got {p}")
        if self.kind == "exponential" and not (len(p) == 1 and p[0] > 0):
            raise ModelError(f"exponential needs rate > 0, got {p}")
        if self.kind == "empirical" and not p:
            raise ModelError("empirical distribution needs at least one value")

    @classmethod
    def uniform(cls, lo: float, hi: float, dimension: int = 1) -> DistributionSpec:
        return cls("uniform", (lo, hi), dimension)

    @classmethod
    def normal(cls, mean: float, std: float, dimension: int = 1) -> DistributionSpec:
        return cls("normal", (mean, std), dimension)

    @classmethod
    def exponential(cls, rate: float, dimension: int = 1) -> DistributionSpec:
        return cls("exponential", (rate,), dimension)

    @classmethod
    def empirical(cls, values: Iterable[float], dimension: int = 1) -> DistributionSpec:
        return cls("empirical", tuple(values), dimension)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        shape = (n, self.dimension)
        if self.kind == "uniform":
            lo, hi = self.params
            return lo + (hi - lo) * rng.random(shape)
        if self.kind == "normal":
            mean, std = self.params
            return rng.normal(mean, std, shape)
        if self.kind == "exponential":
            return rng.exponential(1.0 / self.params[0], shape)
        values = np.asarray(self.params)
        return values[rng.integers(0, len(values), shape)]

    def in_support(self, values: np.ndarray) -> bool:
        values = np.asarray(values, dtype=float)
        if self.kind == "uniform":
            lo, hi = self.params
            return bool(np.all((values >= lo) & (values <= hi)))
        if self.kind == "normal":
            return bool(np.all(np.isfinite(values)))
        if self.kind == "exponential":
            return bool(np.all(values >= 0))
        return bool(np.all(np.isin(values, np.asarray(self.params))))

    def descriptor(self) -> str:
        """Whitespace-free text form, e.g. ``uniform(0.0;200.0)``."""
        return f"{self.kind}({';'.join(repr(v) for v in self.params)})"

    @classmethod
    def from_descriptor(cls, text: str, dimension: int = 1) -> DistributionSpec:
        m = re.fullmatch(r"([a-z]+)\(([^()\s]*)\)", text.strip())
        if not m:
            raise ModelError(f"malformed distribution descriptor {text!r}")
        kind, body = m.groups()
        try:
            params = tuple(float(v) for v in body.split(";")) if body else ()
        except ValueError as exc:
            raise ModelError(f"malformed distribution descriptor {text!r}") from exc
        return cls(kind, params, dimension)


@dataclass(frozen=True, eq=False)
class ScenarioSet:
    realizations: np.ndarray
    seed: int
    source: DistributionSpec
    algorithm: str = RNG_ALGORITHM

    def __post_init__(self) -> None:
        arr = np.asarray(self.realizations, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ModelError(f"realizations must be a nonempty N x d matrix, got shape {arr.shape}")
        if arr.shape[1] != self.source.dimension:
            raise ModelError(f"realizations have d={arr.shape[1]}, source has d={self.source.dimension}")
        arr.setflags(write=False)
        object.__setattr__(self, "realizations", arr)

    def __len__(self) -> int:
        return self.realizations.shape[0]

    @property
    def dimension(self) -> int:
        return self.realizations.shape[1]


def generate_scenarios(spec: DistributionSpec, n: int, seed: int) -> ScenarioSet:
    """Draw ``n`` i.i.d. realizations; identical arguments give identical bits."""
    if int(n) != n or n < 1:
        raise ModelError(f"n must be a positive integer, got {n}")
    seed = int(seed) & _MASK64
    return ScenarioSet(spec.sample(make_rng(seed), int(n)), seed, spec)


def write_scenarios(scenarios: ScenarioSet, dest: str | os.PathLike | io.TextIOBase) -> None:
    """Write the ``saa-scenarios 1`` text format (17 significant digits)."""
    lines = [
        "saa-scenarios 1",
        f"{len(scenarios)} {scenarios.dimension} {scenarios.seed} {scenarios.source.descriptor()}",
    ]
    lines += [" ".join(f"{v:.17g}" for v in row) for row in scenarios.realizations]
    text = "\n".join(lines) + "\n"
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", encoding="ascii") as fh:
            fh.write(text)


def read_scenarios(src: str | os.PathLike | io.TextIOBase) -> ScenarioSet:
    if hasattr(src, "read"):
        text = src.read()
    else:
        with open(src, encoding="ascii") as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2 or lines[0].split() != ["saa-scenarios", "1"]:
        raise ModelError("not a saa-scenarios version 1 file")
    head = lines[1].split()
    if len(head) != 4:
        raise ModelError(f"bad header line {lines[1]!r}")
    try:
        n, d, seed = int(head[0]), int(head[1]), int(head[2])
    except ValueError as exc:
        raise ModelError(f"bad header line {lines[1]!r}") from exc
    source = DistributionSpec.from_descriptor(head[3], d)
    body = lines[2:]
    if len(body) != n:
        raise ModelError(f"header announces {n} rows, file has {len(body)}")
    rows = [[float(v) for v in ln.split()] for ln in body]
    if any(len(r) != d for r in rows):
        raise ModelError(f"every row must have {d} values")
    return ScenarioSet(np.array(rows, dtype=float).reshape(n, d), seed, source)


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------

Mapping = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ChanceConstraint:
    """``P(G(x, xi) >= 0) >= beta`` with ``G`` vectorized over scenarios."""

    mapping: Mapping
    beta: float
    label: str = "c"
    batch_mapping: Mapping | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.beta < 1.0:
            raise ModelError(f"beta must lie in (0, 1), got {self.beta}")

    @classmethod
    def at_most(cls, mapping: Mapping, beta: float, label: str = "c",
                batch_mapping: Mapping | None = None) -> ChanceConstraint:
        """Build from a ``G(x, xi) <= 0`` style mapping by negating it."""
        neg_batch = None
        if batch_mapping is not None:
            def neg_batch(X, xi, _f=batch_mapping):
                return -np.asarray(_f(X, xi))
        return cls(lambda x, xi, _f=mapping: -np.asarray(_f(x, xi)), beta, label, neg_batch)

    def successes(self, decision: np.ndarray, xi: np.ndarray) -> np.ndarray:
        g = np.asarray(self.mapping(decision, xi), dtype=float)
        if g.ndim == 1:
            return g >= 0
        return np.all(g >= 0, axis=1)

    def success_counts(self, decisions: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """Success count for every row of ``decisions``."""
        if self.batch_mapping is not None:
            g = np.asarray(self.batch_mapping(decisions, xi), dtype=float)
            ok = g >= 0 if g.ndim == 2 else np.all(g >= 0, axis=2)
            return ok.sum(axis=1)
        return np.array([int(self.successes(x, xi).sum()) for x in decisions], dtype=np.int64)


def _as_decision_matrix(space) -> np.ndarray:
    arr = np.asarray(space, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ModelError("decision space must be a nonempty finite set of vectors")
    return arr


@dataclass(frozen=True, eq=False)
class Problem:
    """Finite chance-constrained problem, minimizing ``objective``.

    With ``stochastic_objective=False`` the objective is ``f(x) -> float``;
    otherwise it is ``F(x, xi) -> (N,)`` evaluated per scenario and averaged.
    ``decision_space`` is stored sorted lexicographically, which is also the
    tie-breaking order of :func:`solve_saa`.
    """

    decision_space: np.ndarray
    constraints: tuple[ChanceConstraint, ...]
    distribution: DistributionSpec
    objective: Callable | None = None
    stochastic_objective: bool = False
    batch_objective: Callable | None = None
    name: str = "problem"
    _objective_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        space = _as_decision_matrix(self.decision_space)
        order = np.lexsort(space.T[::-1])
        space = space[order]
        space.setflags(write=False)
        object.__setattr__(self, "decision_space", space)
        constraints = tuple(self.constraints)
        if not constraints:
            raise ModelError("a problem needs at least one chance constraint")
        object.__setattr__(self, "constraints", constraints)

    @property
    def has_objective(self) -> bool:
        return self.objective is not None or self.batch_objective is not None

    def deterministic_costs(self) -> np.ndarray:
        """f(x) for every decision (cached; zeros for a pure satisfaction problem)."""
        if "costs" not in self._objective_cache:
            if not self.has_objective:
                costs = np.zeros(len(self.decision_space))
            elif self.batch_objective is not None:
                costs = np.asarray(self.batch_objective(self.decision_space), dtype=float)
            else:
                costs = np.array([float(self.objective(x)) for x in self.decision_space])
            self._objective_cache["costs"] = costs
        return self._objective_cache["costs"]

    def objective_samples(self, decision: np.ndarray, xi: np.ndarray) -> np.ndarray:
        return np.asarray(self.objective(decision, xi), dtype=float).reshape(-1)


@dataclass(frozen=True, eq=False)
class SAASolution:
    decision: np.ndarray
    cost: float
    successes: tuple[int, ...]
    cost_samples: np.ndarray | None = None


def count_successes(decision, constraint: ChanceConstraint, scenarios: ScenarioSet) -> int:
    x = np.atleast_1d(np.asarray(decision, dtype=float))
    return int(constraint.successes(x, scenarios.realizations).sum())


def satisfaction_rate(decision, constraint: ChanceConstraint, scenarios: ScenarioSet) -> float:
    """Fraction of scenarios in which every component of G(x, xi) is >= 0."""
    return count_successes(decision, constraint, scenarios) / len(scenarios)


def _check_sets(problem: Problem, scenario_sets: Sequence[ScenarioSet]) -> None:
    if len(scenario_sets) != len(problem.constraints):
        raise ModelError(
            f"need one scenario set per constraint: {len(problem.constraints)} constraints, "
            f"{len(scenario_sets)} sets"
        )


def _required(n: int, beta: float, theta: float) -> int:
    return success_threshold(n, beta + theta)


def is_saa_feasible(decision, problem: Problem, scenario_sets: Sequence[ScenarioSet], theta: float) -> bool:
    """True iff each constraint's success count reaches ceil(N (beta_i + theta))."""
    _check_sets(problem, scenario_sets)
    for con, sset in zip(problem.constraints, scenario_sets):
        if count_successes(decision, con, sset) < _required(len(sset), con.beta, theta):
            return False
    return True


def saa_feasible_mask(problem: Problem, scenario_sets: Sequence[ScenarioSet], theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Feasibility mask over the decision space and the (C, K) success counts."""
    _check_sets(problem, scenario_sets)
    space = problem.decision_space
    counts = np.empty((len(problem.constraints), len(space)), dtype=np.int64)
    mask = np.ones(len(space), dtype=bool)
    for i, (con, sset) in enumerate(zip(problem.constraints, scenario_sets)):
        counts[i] = con.success_counts(space, sset.realizations)
        mask &= counts[i] >= _required(len(sset), con.beta, theta)
    return mask, counts


def solve_saa(
    problem: Problem,
    scenario_sets: Sequence[ScenarioSet],
    theta: float,
    objective_scenarios: ScenarioSet | None = None,
) -> SAASolution | None:
    """Exhaustively solve the sampled problem; ``None`` when nothing is feasible.

    Ties in cost go to the lexicographically smallest decision.
    """
    mask, counts = saa_feasible_mask(problem, scenario_sets, theta)
    feasible = np.flatnonzero(mask)
    if feasible.size == 0:
        return None
    space = problem.decision_space
    samples = None
    if problem.stochastic_objective:
        if objective_scenarios is None:
            raise ModelError("a stochastic objective needs an objective scenario set")
        xi = objective_scenarios.realizations
        if problem.batch_objective is not None:
            per = np.asarray(problem.batch_objective(space[feasible], xi), dtype=float)
        else:
            per = np.stack([problem.objective_samples(space[k], xi) for k in feasible])
        costs = per.mean(axis=1)
        best = int(np.argmin(costs))
        samples = per[best].copy()
        cost = float(costs[best])
    else:
        costs = problem.deterministic_costs()[feasible]
        best = int(np.argmin(costs))
        cost = float(costs[best])
    k = int(feasible[best])
    return SAASolution(
        decision=space[k].copy(),
        cost=cost,
        successes=tuple(int(c) for c in counts[:, k]),
        cost_samples=samples,
    )
