"""
Bounding the optimum with replications
======================================

A single sampled problem can be unlucky. Solving M independent copies and
sorting their costs gives a confidence interval for the true optimum.
"""

from saa import compute_bounds, newsvendor_problem, order_statistic_indices, plan_sample_size, run_replications

problem = newsvendor_problem(0.5)
plan = plan_sample_size(0.5, 0.15, 0.9)

# With M = 200 replications and 80% confidence the bounds are read off
# positions 15 and 26 of the sorted costs.
print(order_statistic_indices(200, alpha=0.9, delta=0.8))

outcomes = run_replications(problem, plan, m=200, master_seed=42)
report = compute_bounds(outcomes, alpha=0.9, delta=0.8)
print(f"[{report.lower_bound:g}, {report.upper_bound:g}]  verdict: {report.verdict.value}")
print("smallest costs:", report.sorted_costs[:30])

# Too few replications leave no valid lower position.
idx = order_statistic_indices(10, 0.9, 0.8)
print("M = 10:", idx)

# Threads speed up the replications without changing the report.
parallel = compute_bounds(run_replications(problem, plan, 200, 42, jobs=4), 0.9, 0.8)
print("same report with 4 threads:", parallel.to_json() == report.to_json())
