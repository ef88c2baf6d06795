import math

import numpy as np
import pytest

from oracles import binom_tail_ge, cp_lower_definition, hoeffding
from saa.planner import (
    PlanningError,
    acceptance_probability,
    classification_bands,
    plan_multi_constraint,
    plan_sample_size,
    rejection_probability,
    success_threshold,
)


@pytest.fixture(scope="module")
def plan():
    return plan_sample_size(0.5, 0.15, 0.9, 10_000)


def test_newsvendor_plan(plan):
    assert plan.n_hat == 14
    assert plan.success_threshold == 10
    assert plan.p_lb_at_plan == pytest.approx(0.508, abs=5e-4)


def test_thirteen_is_rejected():
    # direct-summation definition at N = 13, X = ceil(13 * 0.65) = 9
    assert success_threshold(13, 0.65) == 9
    assert cp_lower_definition(13, 9, 0.1) < 0.5


def test_n_max_exceeded():
    with pytest.raises(PlanningError, match="n_max exceeded"):
        plan_sample_size(0.9, 0.05, 0.95, n_max=10)


@pytest.mark.parametrize("theta", [0.0, -0.1, 0.5, 0.6])
def test_theta_out_of_range(theta):
    with pytest.raises(PlanningError, match="theta out of range"):
        plan_sample_size(0.5, theta, 0.9)


def test_exact_integer_threshold_kept():
    assert success_threshold(20, 0.65) == 13
    assert success_threshold(14, 0.65) == 10
    assert success_threshold(100, 0.7) == 70


@pytest.mark.parametrize("beta,theta,alpha", [(0.5, 0.15, 0.9), (0.8, 0.1, 0.9), (0.3, 0.2, 0.95), (0.9, 0.05, 0.8)])
def test_minimality(beta, theta, alpha):
    plan = plan_sample_size(beta, theta, alpha)
    assert plan.n_hat <= 200
    x = plan.success_threshold
    assert cp_lower_definition(plan.n_hat, x, 1 - alpha) >= beta - 1e-9
    for n in range(1, plan.n_hat):
        xn = math.ceil(round(n * (beta + theta), 9))
        if xn <= n:
            assert cp_lower_definition(n, xn, 1 - alpha) < beta


def test_multi_single():
    assert plan_multi_constraint([(0.5, 0.15)], 0.9).n_hat == 14


def test_multi_identical():
    assert plan_multi_constraint([(0.5, 0.15), (0.5, 0.15)], 0.9).n_hat == 14


def test_multi_takes_max():
    multi = plan_multi_constraint([(0.5, 0.15), (0.8, 0.1)], 0.9)
    singles = [plan_sample_size(0.5, 0.15, 0.9).n_hat, plan_sample_size(0.8, 0.1, 0.9).n_hat]
    assert [p.n_hat for p in multi.plans] == singles
    assert multi.n_hat == max(singles)


def test_multi_empty():
    with pytest.raises(PlanningError):
        plan_multi_constraint([], 0.9)


def test_bands_newsvendor(plan):
    bands = classification_bands(plan)
    assert bands.reject_band_upper == pytest.approx(0.508, abs=5e-4)
    assert bands.midpoint == pytest.approx(0.65)
    assert bands.accept_band_lower == pytest.approx(0.869060596293457, abs=1e-12)
    lo, mid, hi = bands.to_units(lambda p: 200 * p)
    assert lo == pytest.approx(101.6, abs=0.1)
    assert mid == pytest.approx(130, abs=0.1)
    assert hi == pytest.approx(173.8, abs=0.1)


def test_band_semantics(plan):
    bands = classification_bands(plan)
    assert bands.reject_band_upper < bands.midpoint < bands.accept_band_lower
    assert acceptance_probability(plan, bands.reject_band_upper) == pytest.approx(0.1, abs=1e-9)
    assert acceptance_probability(plan, bands.accept_band_lower) >= plan.alpha
    inner_low = 0.5 * (bands.reject_band_upper + bands.midpoint)
    inner_high = 0.5 * (bands.midpoint + bands.accept_band_lower)
    assert 0.1 < acceptance_probability(plan, inner_low) < 0.5
    assert 0.5 < acceptance_probability(plan, inner_high) < 0.9
    assert bands.band_of(0.3) == "reject"
    assert bands.band_of(inner_low) == "below_midpoint"
    assert bands.band_of(inner_high) == "above_midpoint"
    assert bands.band_of(0.95) == "accept"
    assert bands.band_of(bands.reject_band_upper) == "reject"


def test_acceptance_at_midpoint(plan):
    value = acceptance_probability(plan, 0.65)
    assert value == pytest.approx(binom_tail_ge(14, 0.65, 10), abs=1e-12)
    assert value == pytest.approx(0.4227229889389459, abs=1e-12)
    assert 0.4 < value < 0.6


def test_rejection_extremes(plan):
    assert rejection_probability(plan, 0.0) == 1.0
    assert rejection_probability(plan, 1.0) == 0.0
    assert rejection_probability(plan, 0.5) >= 0.9


def test_guarantee_grid(plan):
    for p in np.linspace(0, plan.beta, 11):
        assert rejection_probability(plan, p) >= plan.alpha


def test_hoeffding_envelope(plan):
    level = plan.beta + plan.theta
    for p in np.linspace(0.0, level - 1e-9, 66):
        assert acceptance_probability(plan, p) <= hoeffding(plan.n_hat, level, p) + 1e-9


def test_monotone_acceptance(plan):
    ps = np.linspace(0, 1, 201)
    acc = [acceptance_probability(plan, p) for p in ps]
    assert all(a <= b + 1e-15 for a, b in zip(acc, acc[1:]))


def test_theta_tradeoff():
    ns = [plan_sample_size(0.5, t, 0.9).n_hat for t in (0.05, 0.10, 0.15)]
    assert ns[0] >= ns[1] >= ns[2]


def test_plan_invariants(plan):
    assert plan.success_threshold <= plan.n_hat
    assert 0 < plan.theta < 1 - plan.beta
