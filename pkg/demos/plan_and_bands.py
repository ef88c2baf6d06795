"""
Planning the sample size
========================

How many scenarios does the sampled problem need before its answer can be
trusted? This script plans N for a single chance constraint and then looks
at how reliably the sampled problem classifies decisions of varying quality.
"""

import numpy as np

from saa import acceptance_probability, classification_bands, plan_sample_size

# We want the constraint to hold with probability 0.5. The sampled problem
# asks for a little more (0.5 + theta) so that a lucky sample does not
# admit a decision that is actually too weak.
plan = plan_sample_size(beta=0.5, theta=0.15, alpha=0.9)
print(f"N-hat = {plan.n_hat}, at least {plan.success_threshold} successes needed")
print(f"lower confidence bound at the plan: {plan.p_lb_at_plan:.4f}")

# A smaller tolerance costs many more scenarios.
for theta in (0.05, 0.10, 0.15):
    print(f"theta = {theta:.2f} -> N-hat = {plan_sample_size(0.5, theta, 0.9).n_hat}")

# The bands split the true satisfaction probability into regions. At the
# extremes the sampled problem's verdict is almost certain. Near the midpoint
# it is close to a coin toss.
bands = classification_bands(plan)
print("band edges:", bands.reject_band_upper, bands.midpoint, bands.accept_band_lower)

# In the newsvendor model an order of Q units is satisfied with probability
# Q / 200, so the edges translate directly into order quantities.
lo, mid, hi = bands.to_units(lambda p: 200 * p)
print(f"orders below {lo:.1f} are rejected, orders above {hi:.1f} are accepted")

# The acceptance curve itself, on a coarse grid.
for p in np.linspace(0.3, 1.0, 8):
    print(f"p = {p:.2f}  P(accept) = {acceptance_probability(plan, p):.3f}  [{bands.band_of(p)}]")
