"""
Checking a solution afterwards, and noisy objectives
====================================================

Once a decision is in hand it can be re-tested on a large fresh sample.
The second half deals with objectives that are themselves expectations,
where replication costs are only known up to a confidence interval.
"""

import numpy as np

from saa import (
    ChanceConstraint,
    DistributionSpec,
    Problem,
    newsvendor_problem,
    plan_sample_size,
    run_replications,
    totalize_order,
    validate,
)

problem = newsvendor_problem(0.5)

# Use a seed that played no part in solving. Reusing the solving sample
# would make the check look better than it is.
for q in (95, 110, 130):
    report = validate([q], problem, n_prime=10_000, alpha_prime=0.99, seed=2024)
    check = report.constraints[0]
    print(f"Q = {q}: {check.successes} / {check.n} covered, lower bound {check.p_lb:.4f}, pass = {report.passed}")

# A toy problem with a noisy cost: choose x in 0..10 to minimise E[(x - xi)^2]
# with xi uniform on [0, 10]. The true costs are (x - 5)^2 + 100/12.
spec = DistributionSpec.uniform(0, 10)
noisy = Problem(
    np.arange(11),
    [ChanceConstraint(lambda x, xi: 3.0 - np.abs(x[0] - xi[:, 0]), 0.5)],
    spec,
    objective=lambda x, xi: (x[0] - xi[:, 0]) ** 2,
    stochastic_objective=True,
)
plan = plan_sample_size(0.5, 0.15, 0.9)
outcomes = run_replications(noisy, plan, 8, master_seed=1, objective_samples=30)
for o in outcomes:
    print(o.index, o.decision, round(o.cost, 2), np.round(o.cost_interval, 2))

# Overlapping intervals cannot be ranked. Re-estimating all solutions on one
# large common sample settles the order.
ranked = totalize_order(outcomes, "simulate", problem=noisy, evaluation_size=50_000, seed=99)
print("re-ranked:", [(o.decision, round(o.cost, 2)) for o in ranked])
