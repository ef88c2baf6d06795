"""Sample average approximation for chance-constrained problems."""

__version__ = "0.1.0"

from .special import (
    BinomialSpec,
    DomainError,
    binom_cdf,
    binom_pmf,
    binom_sf,
    inv_reg_inc_beta,
    reg_inc_beta,
    student_t_quantile,
)
from .confidence import ConfidenceInterval, cp_lower_one_sided, cp_two_sided, cp_upper_one_sided
from .planner import (
    BandReport,
    PlanningError,
    SamplePlan,
    acceptance_probability,
    classification_bands,
    plan_multi_constraint,
    plan_sample_size,
    rejection_probability,
)
from .core import (
    ChanceConstraint,
    DistributionSpec,
    ModelError,
    Problem,
    ScenarioSet,
    generate_scenarios,
    is_saa_feasible,
    read_scenarios,
    satisfaction_rate,
    solve_saa,
    write_scenarios,
)
from .bounds import (
    BoundsReport,
    InsufficientReplicationsError,
    ReplicationOutcome,
    compare_stochastic_costs,
    compute_bounds,
    cost_interval,
    order_statistic_indices,
    run_replications,
    totalize_order,
)
from .validation import ValidationReport, validate
from .newsvendor import NewsvendorModel, analytic_min_feasible_q, newsvendor_problem, true_satisfaction
