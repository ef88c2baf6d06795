"""
Solving a sampled newsvendor problem
====================================

Demand is uniform on [0, 200] and the order Q must cover demand with
probability at least 0.5. The cheapest such order is Q = 100. Here we
solve sampled versions of the problem and compare.
"""

import numpy as np

from saa import generate_scenarios, newsvendor_problem, plan_sample_size, solve_saa
from saa.core import mix_seed
from saa.newsvendor import analytic_min_feasible_q, true_satisfaction

problem = newsvendor_problem(beta=0.5)
plan = plan_sample_size(0.5, 0.15, 0.9)
print("exact optimum:", analytic_min_feasible_q(0.5))

# One sampled problem: draw N-hat demands and find the smallest order that
# covers at least the required number of them.
scenarios = generate_scenarios(problem.distribution, plan.n_hat, seed=7)
print("sampled demands:", np.round(np.sort(scenarios.realizations[:, 0]), 1))
solution = solve_saa(problem, [scenarios], plan.theta)
print(f"sampled optimum Q = {solution.cost:g}, covering {solution.successes[0]} of {plan.n_hat}")

# Repeat with many seeds. Most sampled optima sit above 100, because the
# sampled problem demands 0.65 coverage rather than 0.5.
orders = []
for i in range(1000):
    s = generate_scenarios(problem.distribution, plan.n_hat, mix_seed(7, i))
    sol = solve_saa(problem, [s], plan.theta)
    orders.append(sol.cost)
orders = np.array(orders)
print(f"mean sampled optimum {orders.mean():.1f}")
print(f"fraction truly infeasible (Q < 100): {np.mean(orders < 100):.3f}  (guaranteed <= 0.1)")
print(f"true coverage of the median order: {true_satisfaction(np.median(orders)):.3f}")
