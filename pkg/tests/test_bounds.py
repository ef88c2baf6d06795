import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import order_indices_by_summation
from saa.bounds import (
    IncreaseReplications,
    InsufficientReplicationsError,
    Ordering,
    ReplicationOutcome,
    Verdict,
    compare_stochastic_costs,
    compute_bounds,
    cost_interval,
    order_statistic_indices,
    position_is_determined,
    run_replications,
    totalize_order,
)
from saa.core import ChanceConstraint, DistributionSpec, Problem, mix_seed
from saa.newsvendor import newsvendor_problem
from saa.planner import plan_sample_size


@pytest.fixture(scope="module")
def nv():
    return newsvendor_problem(0.5)


@pytest.fixture(scope="module")
def plan():
    return plan_sample_size(0.5, 0.15, 0.9)


def _outcomes(costs):
    return [
        ReplicationOutcome(i + 1, float(c), None if math.isinf(c) else (float(c),))
        for i, c in enumerate(costs)
    ]


class TestIndices:
    def test_reference_case(self):
        assert order_statistic_indices(200, 0.9, 0.8) == (15, 26)
        assert order_indices_by_summation(200, 0.9, 0.8) == (15, 26)

    @pytest.mark.parametrize("m", [5, 10, 20, 37, 50, 120, 300])
    @pytest.mark.parametrize("alpha,delta", [(0.9, 0.8), (0.95, 0.9), (0.8, 0.5)])
    def test_match_summation(self, m, alpha, delta):
        lo, hi = order_indices_by_summation(m, alpha, delta)
        if hi is None:
            with pytest.raises(InsufficientReplicationsError):
                order_statistic_indices(m, alpha, delta)
        else:
            assert tuple(order_statistic_indices(m, alpha, delta)) == (lo, hi)

    def test_too_few_for_lower(self):
        idx = order_statistic_indices(10, 0.9, 0.8)
        assert idx.l_index is None
        assert idx.u_index == 2

    def test_single_replication(self):
        idx = order_statistic_indices(1, 0.9, 0.8)
        assert idx.l_index is None and idx.u_index == 1

    @given(st.integers(1, 60), st.floats(0.5, 0.99), st.floats(0.05, 0.999))
    def test_upper_always_within_m(self, m, alpha, delta):
        # P(Bin(M, .) <= M) = 1, so some U <= M always qualifies
        assert 1 <= order_statistic_indices(m, alpha, delta).u_index <= m

    def test_delta_monotone(self):
        prev = order_statistic_indices(200, 0.9, 0.5)
        for d in (0.6, 0.7, 0.8, 0.9, 0.95, 0.99):
            cur = order_statistic_indices(200, 0.9, d)
            assert cur.l_index <= prev.l_index
            assert cur.u_index >= prev.u_index
            prev = cur

    @pytest.mark.parametrize("bad", [(0, 0.9, 0.8), (10, 1.0, 0.8), (10, 0.9, 0.0), (2.5, 0.9, 0.8)])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            order_statistic_indices(*bad)


class TestReplications:
    def test_deterministic(self, nv, plan):
        a = run_replications(nv, plan, 50, 42)
        b = run_replications(nv, plan, 50, 42)
        assert [o.cost for o in a] == [o.cost for o in b]
        assert [o.cost for o in a] != [o.cost for o in run_replications(nv, plan, 50, 43)]

    def test_costs_integral(self, nv, plan):
        for o in run_replications(nv, plan, 200, 42):
            assert math.isinf(o.cost) or (o.cost.is_integer() and 0 <= o.cost <= 200)

    def test_jobs_invariant(self, nv, plan):
        a = compute_bounds(run_replications(nv, plan, 200, 42, jobs=1), 0.9, 0.8).to_json()
        b = compute_bounds(run_replications(nv, plan, 200, 42, jobs=8), 0.9, 0.8).to_json()
        assert a == b

    def test_seed_layout(self, nv, plan):
        from saa.core import generate_scenarios, solve_saa

        out = run_replications(nv, plan, 3, 9)
        s = generate_scenarios(nv.distribution, plan.n_hat, mix_seed(9, 2, 0))
        assert out[1].cost == solve_saa(nv, [s], plan.theta).cost

    def test_bad_fraction(self, nv, plan):
        # a replication is "bad" when its decision is truly infeasible (Q < 100)
        outcomes = run_replications(nv, plan, 2000, 2024)
        bad = sum(o.feasible and o.decision[0] < 100 for o in outcomes) / len(outcomes)
        assert bad <= 0.1 + 3 * math.sqrt(0.09 / 2000)


class TestReport:
    def test_newsvendor_report(self, nv, plan):
        report = compute_bounds(run_replications(nv, plan, 200, 42), 0.9, 0.8)
        assert (report.l_index, report.u_index) == (15, 26)
        assert report.verdict is Verdict.BOUNDS
        assert report.lower_bound <= report.upper_bound
        assert list(report.sorted_costs) == sorted(report.sorted_costs)
        d = json.loads(report.to_json())
        assert set(d) == {"m", "alpha", "delta", "l_index", "u_index", "lower_bound", "upper_bound", "verdict", "costs"}

    def test_all_infeasible(self):
        report = compute_bounds(_outcomes([math.inf] * 200), 0.9, 0.8)
        assert report.verdict is Verdict.INFEASIBLE_AT_DELTA
        assert report.to_dict()["lower_bound"] == "inf"

    def test_infeasible_from_u(self):
        costs = list(range(25)) + [math.inf] * 175
        report = compute_bounds(_outcomes(costs), 0.9, 0.8)
        assert report.verdict is Verdict.INCONCLUSIVE
        assert report.lower_bound == 14
        assert math.isinf(report.upper_bound)

    def test_too_few(self):
        with pytest.raises(InsufficientReplicationsError):
            compute_bounds(_outcomes(range(10)), 0.9, 0.8)

    def test_empty(self):
        with pytest.raises(ValueError):
            compute_bounds([], 0.9, 0.8)

    @settings(max_examples=30)
    @given(st.lists(st.one_of(st.integers(0, 200).map(float), st.just(math.inf)), min_size=200, max_size=200), st.randoms())
    def test_permutation_invariant(self, costs, rnd):
        a = compute_bounds(_outcomes(costs), 0.9, 0.8)
        shuffled = list(costs)
        rnd.shuffle(shuffled)
        b = compute_bounds(_outcomes(shuffled), 0.9, 0.8)
        assert (a.lower_bound, a.upper_bound, a.verdict) == (b.lower_bound, b.upper_bound, b.verdict)
        assert a.sorted_costs == b.sorted_costs

    @pytest.mark.slow
    def test_coverage(self, nv, plan):
        # the true optimum is Q* = 100; [lower, upper] should contain it with frequency >= delta
        reports = 300
        hits = 0
        for r in range(reports):
            rep = compute_bounds(run_replications(nv, plan, 200, mix_seed(5, r)), 0.9, 0.8)
            hits += rep.lower_bound <= 100 <= rep.upper_bound
        assert hits / reports >= 0.8 - 3 * math.sqrt(0.16 / reports)


# stochastic objective: E[(x - xi)^2] = (x - 5)^2 + 100/12 for xi ~ U(0, 10)
SPEC = DistributionSpec.uniform(0, 10)


def _quadratic_problem():
    return Problem(
        np.arange(11),
        [ChanceConstraint(lambda x, xi: np.ones(len(xi)), 0.5)],
        SPEC,
        objective=lambda x, xi: (x[0] - xi[:, 0]) ** 2,
        stochastic_objective=True,
    )


class TestStochastic:
    def test_cost_interval_known(self):
        lo, hi = cost_interval([1.0, 2.0, 3.0], 0.95)
        half = 4.302652729911275 * 1.0 / math.sqrt(3)
        assert lo == pytest.approx(2 - half, abs=1e-9)
        assert hi == pytest.approx(2 + half, abs=1e-9)

    def test_cost_interval_constant(self):
        assert cost_interval([4.0] * 5, 0.9) == (4.0, 4.0)

    def test_cost_interval_needs_two(self):
        with pytest.raises(ValueError):
            cost_interval([1.0], 0.9)

    def test_cost_interval_coverage(self):
        rng = np.random.default_rng(3)
        trials = 3000
        hits = 0
        for _ in range(trials):
            lo, hi = cost_interval(rng.normal(1.0, 2.0, size=8), 0.9)
            hits += lo <= 1.0 <= hi
        assert abs(hits / trials - 0.9) < 3 * math.sqrt(0.09 / trials)

    def test_compare(self):
        a = ReplicationOutcome(1, 1.0, (0.0,), (0.5, 1.5))
        b = ReplicationOutcome(2, 3.0, (1.0,), (2.5, 3.5))
        c = ReplicationOutcome(3, 1.4, (2.0,), (1.2, 2.6))
        assert compare_stochastic_costs(a, b) is Ordering.LESS
        assert compare_stochastic_costs(b, a) is Ordering.GREATER
        assert compare_stochastic_costs(a, c) is Ordering.INCOMPARABLE
        with pytest.raises(ValueError):
            compare_stochastic_costs(a, ReplicationOutcome(4, 1.0, (0.0,)))

    def test_position_determined(self):
        outs = [
            ReplicationOutcome(1, 1.0, (0.0,), (0.5, 1.5)),
            ReplicationOutcome(2, 1.4, (2.0,), (1.2, 2.6)),
            ReplicationOutcome(3, 5.0, (1.0,), (4.5, 5.5)),
            ReplicationOutcome(4, math.inf),
        ]
        assert not position_is_determined(outs, 1)
        assert position_is_determined(outs, 3)
        assert position_is_determined(outs, 4)

    def test_saa_objective_default(self):
        outs = [ReplicationOutcome(1, 2.0, (3.0,), (1, 3)), ReplicationOutcome(2, 2.0, (1.0,), (1, 3)),
                ReplicationOutcome(3, math.inf), ReplicationOutcome(4, 0.5, (9.0,), (0, 1))]
        ordered = totalize_order(outs)
        assert [o.index for o in ordered] == [4, 2, 1, 3]

    def test_increase_m(self):
        res = totalize_order(_outcomes([1.0, 2.0]), "increase_M")
        assert res == IncreaseReplications(2, 4)

    def test_unknown_strategy(self):
        with pytest.raises(ValueError):
            totalize_order(_outcomes([1.0]), "coin_flip")

    def test_simulate_recovers_true_order(self):
        p = _quadratic_problem()
        outs = [ReplicationOutcome(i + 1, 0.0, (float(x),), (0.0, 0.0)) for i, x in enumerate([0, 9, 5, 2, 7])]
        outs.append(ReplicationOutcome(6, math.inf))
        ordered = totalize_order(outs, "simulate", problem=p, evaluation_size=50_000, seed=1)
        assert [o.decision for o in ordered[:-1]] == [(5.0,), (7.0,), (2.0,), (9.0,), (0.0,)]
        assert not ordered[-1].feasible
        for o in ordered[:-1]:
            assert o.cost == pytest.approx((o.decision[0] - 5) ** 2 + 100 / 12, rel=0.02)
            assert o.cost_interval[0] <= o.cost <= o.cost_interval[1]

    def test_simulate_needs_inputs(self):
        with pytest.raises(ValueError):
            totalize_order(_outcomes([1.0]), "simulate")

    def test_replications_carry_intervals(self, plan):
        p = _quadratic_problem()
        outs = run_replications(p, plan, 20, 3, objective_samples=500)
        assert all(o.decision == (5.0,) for o in outs)
        assert all(o.cost_interval[0] <= o.cost <= o.cost_interval[1] for o in outs)
