"""Command-line front end: ``saa {plan,bands,solve,bounds,validate}``.

Every command writes one JSON document to stdout (or ``--output``) and a
short human-readable summary to stderr. All randomness comes from ``--seed``
(falling back to the ``SAA_SEED`` environment variable, then 0).

Exit codes: 0 success, 2 bad parameters, 3 too few replications,
4 unknown model.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Callable

from . import __version__
from .bounds import InsufficientReplicationsError, compute_bounds, run_replications
from .core import ModelError, generate_scenarios, mix_seed, read_scenarios, solve_saa, write_scenarios
from .newsvendor import DEMAND_HIGH, newsvendor_problem
from .planner import PlanningError, classification_bands, plan_multi_constraint, plan_sample_size
from .special import DomainError
from .validation import validate

EXIT_OK = 0
EXIT_PARAM = 2
EXIT_M_TOO_SMALL = 3
EXIT_NO_MODEL = 4

# name -> (problem factory taking beta, probability -> decision-unit map or None)
MODELS: dict[str, tuple[Callable, Callable[[float], float] | None]] = {
    "newsvendor": (newsvendor_problem, lambda p: DEMAND_HIGH * p),
}


class UnknownModelError(LookupError):
    pass


def _get_model(name: str):
    try:
        return MODELS[name]
    except KeyError:
        raise UnknownModelError(f"model not found: {name!r} (known: {', '.join(sorted(MODELS))})") from None


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SAA_SEED")
    if env is not None:
        try:
            return int(env, 0)
        except ValueError:
            raise DomainError(f"SAA_SEED is not an integer: {env!r}") from None
    return 0


def _plain(v: float):
    return int(v) if float(v).is_integer() else float(v)


def _read_constraints(path: str) -> list[tuple[float, float]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].replace(",", " ").strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DomainError(f"constraints file rows must be 'beta theta', got {line!r}")
            rows.append((float(parts[0]), float(parts[1])))
    if not rows:
        raise DomainError(f"constraints file {path!r} has no rows")
    return rows


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_plan(args) -> dict:
    if args.constraints:
        multi = plan_multi_constraint(_read_constraints(args.constraints), args.alpha, args.n_max)
        print(f"overall N-hat = {multi.n_hat} over {len(multi.plans)} constraints", file=sys.stderr)
        return multi.to_dict()
    plan = plan_sample_size(args.beta, args.theta, args.alpha, args.n_max)
    print(f"N-hat = {plan.n_hat}, X = {plan.success_threshold}, p_lb = {plan.p_lb_at_plan:.4f}", file=sys.stderr)
    return plan.to_dict()


def cmd_bands(args) -> dict:
    plan = plan_sample_size(args.beta, args.theta, args.alpha, args.n_max)
    bands = classification_bands(plan)
    out = {"n_hat": plan.n_hat, "success_threshold": plan.success_threshold, **bands.to_dict()}
    if args.model:
        _, to_units = _get_model(args.model)
        out["thresholds"] = list(bands.to_units(to_units))
    print(
        f"bands: p_lb={bands.reject_band_upper:.4f} mid={bands.midpoint:.4f} p_ub={bands.accept_band_lower:.4f}",
        file=sys.stderr,
    )
    return out


def cmd_solve(args) -> dict:
    factory, _ = _get_model(args.model)
    problem = factory(args.beta)
    seed = _seed(args)
    plan = plan_sample_size(args.beta, args.theta, args.alpha, args.n_max)
    if args.scenarios:
        sets = [read_scenarios(args.scenarios)]
        if len(problem.constraints) != 1:
            raise ModelError("--scenarios supports single-constraint models only")
    else:
        n = args.n or plan.n_hat
        sets = [
            generate_scenarios(problem.distribution, n, mix_seed(seed, 0, j))
            for j in range(len(problem.constraints))
        ]
    if args.write_scenarios:
        write_scenarios(sets[0], args.write_scenarios)
    sol = solve_saa(problem, sets, args.theta)
    out = {
        "model": args.model,
        "n": len(sets[0]),
        "theta": args.theta,
        "seed": sets[0].seed if args.scenarios else seed,
        "feasible": sol is not None,
        "decision": None if sol is None else [_plain(v) for v in sol.decision],
        "cost": "inf" if sol is None else sol.cost,
        "successes": None if sol is None else list(sol.successes),
    }
    print("no SAA-feasible decision" if sol is None else f"decision {out['decision']} cost {sol.cost:g}", file=sys.stderr)
    return out


def cmd_bounds(args) -> dict:
    factory, _ = _get_model(args.model)
    problem = factory(args.beta)
    plan = plan_sample_size(args.beta, args.theta, args.alpha, args.n_max)
    outcomes = run_replications(problem, plan, args.m, _seed(args), jobs=args.jobs)
    report = compute_bounds(outcomes, args.alpha, args.delta)
    print(
        f"L={report.l_index} U={report.u_index} bounds=[{report.lower_bound:g}, {report.upper_bound:g}] "
        f"verdict={report.verdict.value}",
        file=sys.stderr,
    )
    return report.to_dict()


def cmd_validate(args) -> dict:
    factory, _ = _get_model(args.model)
    problem = factory(args.beta)
    try:
        decision = [float(v) for v in args.decision.split(",")]
    except ValueError:
        raise DomainError(f"--decision must be comma-separated numbers, got {args.decision!r}") from None
    report = validate(decision, problem, args.n, args.alpha, _seed(args))
    print("PASS" if report.passed else "FAIL", file=sys.stderr)
    return report.to_dict()


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="saa", description="Sample average approximation for chance constraints")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, targets=True, model=False, seed=False):
        if targets:
            p.add_argument("--beta", type=float, default=0.5, help="target satisfaction probability")
            p.add_argument("--theta", type=float, default=0.15, help="error tolerance threshold")
            p.add_argument("--alpha", type=float, default=0.9, help="confidence probability")
            p.add_argument("--n-max", type=int, default=10**6, help="cap on the planned sample size")
        if model:
            p.add_argument("--model", default="newsvendor")
        if seed:
            p.add_argument("--seed", type=lambda s: int(s, 0), default=None, help="master seed (else $SAA_SEED)")
        p.add_argument("--output", "-o", help="write JSON here instead of stdout")

    p = sub.add_parser("plan", help="a-priori sample size")
    common(p)
    p.add_argument("--constraints", help="file of 'beta theta' rows, one per chance constraint")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bands", help="misclassification bands of the planned sampled problem")
    common(p)
    p.add_argument("--model", default=None, help="also map the bands into this model's decision units")
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("solve", help="solve one sampled problem")
    common(p, model=True, seed=True)
    p.add_argument("--n", type=int, default=None, help="sample size (default: planned N-hat)")
    p.add_argument("--scenarios", help="read the scenario set from a saa-scenarios file")
    p.add_argument("--write-scenarios", help="save the scenario set used")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bounds", help="replication lower/upper bounds")
    common(p, model=True, seed=True)
    p.add_argument("--m", type=int, default=200, help="number of replications")
    p.add_argument("--delta", type=float, default=0.8, help="bound confidence level")
    p.add_argument("--jobs", type=int, default=1, help="worker threads; output does not depend on it")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("validate", help="a-posteriori check of a decision on a fresh sample")
    p.add_argument("--model", default="newsvendor")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--decision", required=True, help="comma-separated decision vector")
    p.add_argument("--n", type=int, default=10_000, help="validation sample size")
    p.add_argument("--alpha", type=float, default=0.99, help="validation confidence")
    p.add_argument("--seed", type=lambda s: int(s, 0), default=None)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except UnknownModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_MODEL
    except InsufficientReplicationsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_M_TOO_SMALL
    except (DomainError, PlanningError, ModelError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    text = json.dumps(result, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
