"""Command-line interface.

Machine-readable JSON goes to stdout, a one-line human summary to stderr.
Exit codes: 0 success, 1 domain error (a structured error object is printed
to stdout), 2 usage or I/O error. Model arguments are file paths; the bare
names of the bundled examples (example31, maintenance) also resolve.
"""

from __future__ import annotations

import argparse
import contextlib
import importlib.resources
import json
import sys

from relimax import oracle as oracle_mod
from relimax.absorbing import compute_largest_absorbing, membership_test
from relimax.errors import RelimaxError
from relimax.evaluate import (
    assemble_failure_vector,
    build_reduced_system,
    evaluate_policy_pes,
    reduced_residual,
    solve_reduced,
)
from relimax.model import (
    ModelSpec,
    format_prob,
    load_model,
    load_policy,
    policy_space_size,
)
from relimax.solver import SolveOptions, solve

ORACLE_AGREEMENT_TOL = 1e-8

_BUNDLED = {"example31": "example31.json", "maintenance": "maintenance.json",
            "example31.json": "example31.json", "maintenance.json": "maintenance.json"}


@contextlib.contextmanager
def _model_path(arg: str):
    import os
    if os.path.exists(arg):
        yield arg
        return
    name = _BUNDLED.get(arg)
    if name is None:
        raise FileNotFoundError(f"no such model file: {arg}")
    resource = importlib.resources.files("relimax.data").joinpath(name)
    with importlib.resources.as_file(resource) as p:
        yield str(p)


def _load(args) -> ModelSpec:
    with _model_path(args.model) as path:
        return load_model(path, force_exact=getattr(args, "exact", False))


def _emit(payload: dict, summary: str) -> None:
    print(json.dumps(payload, indent=2))
    print(summary, file=sys.stderr)


def _cmd_validate(args) -> int:
    model = _load(args)
    payload = {
        "states": model.n_states,
        "failed": len(model.failed_states),
        "pairs": len(model.rows),
        "arithmetic": model.arithmetic,
        "policies": policy_space_size(model),
    }
    _emit(payload, f"model OK: {payload['states']} states, "
                   f"{payload['failed']} failed, {payload['pairs']} rows, "
                   f"{model.arithmetic} arithmetic")
    return 0


def _cmd_absorbing(args) -> int:
    model = _load(args)
    analysis = compute_largest_absorbing(model)
    d = analysis.to_json_dict()
    _emit(d, f"n_star={d['n_star']} f_star={d['f_star']} g_star={d['g_star']}")
    return 0


def _cmd_solve(args) -> int:
    model = _load(args)
    initial = None
    if args.initial_policy:
        initial = load_policy(args.initial_policy, model)
    report = solve(model, SolveOptions(initial_policy=initial,
                                       improve_eps=args.improve_eps))
    d = report.to_json_dict()
    rounds = len(d["iterations"])
    head = {k: d["q_star"][k] for k in list(d["q_star"])[:4]}
    _emit(d, f"solve: {d['termination']} after {rounds} evaluation rounds; "
             f"q* starts {head}")
    return 0


def _cmd_evaluate(args) -> int:
    model = _load(args)
    policy = load_policy(args.policy, model)
    analysis = compute_largest_absorbing(model)
    in_class = membership_test(analysis, policy)
    payload: dict = {"in_class": in_class}
    if in_class and analysis.g_star:
        system = build_reduced_system(model, analysis, policy)
        solved = solve_reduced(system)
        q = assemble_failure_vector(model, analysis, solved)
        payload["method"] = "reduced_system"
        payload["residual"] = (str(reduced_residual(system, solved))
                               if model.is_exact
                               else float(reduced_residual(system, solved)))
    elif in_class:
        q = assemble_failure_vector(model, analysis, {})
        payload["method"] = "reduced_system"  # degenerate: nothing to solve
    else:
        q = evaluate_policy_pes(model, policy, tol=args.tol,
                                max_iters=args.max_iters)
        payload["method"] = "fixed_point"
        payload["warning"] = ("policy leaves the maximal absorbing set; "
                              "value computed by monotone fixed-point iteration")
    payload["q"] = q.to_json_dict(model)
    payload["r"] = {model.state_names[i]: format_prob(1 - v)
                    for i, v in enumerate(q.values)}
    _emit(payload, f"evaluate: method={payload['method']} in_class={in_class}")
    return 0


def _cmd_oracle(args) -> int:
    model = _load(args)
    result = oracle_mod.run_oracle(model, tol=args.tol, max_iters=args.max_iters,
                                   cap=args.enum_cap)
    report = solve(model)
    gaps = [report.q_star.sup_gap(result.q_star_vi)]
    if result.q_star_enum is not None:
        gaps.append(report.q_star.sup_gap(result.q_star_enum))
        gaps.append(result.q_star_vi.sup_gap(result.q_star_enum))
    max_gap = float(max(gaps))
    agree = max_gap <= ORACLE_AGREEMENT_TOL
    payload = {
        "oracle": result.to_json_dict(model),
        "solve": report.to_json_dict(),
        "agreement": {"max_gap": max_gap, "tol": ORACLE_AGREEMENT_TOL,
                      "agree": agree},
    }
    _emit(payload, ("oracle: agree" if agree else "oracle: DISAGREEMENT")
          + f" (max gap {max_gap:.3e})")
    return 0 if agree else 1


def _cmd_simulate(args) -> int:
    model = _load(args)
    policy = load_policy(args.policy, model)
    state = model.state_id(args.state)
    est = oracle_mod.simulate_survival(model, policy, state, args.horizon,
                                       args.trials, args.seed)
    payload = est.to_json_dict(model)
    _emit(payload, f"simulate: {est.hit_count}/{est.trials} failures by step "
                   f"{est.horizon}; estimate {est.estimate:.6f} "
                   f"± {est.half_width_95:.6f} (95%)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relimax",
        description="Maximal reliability of finite controlled Markov systems "
                    "with failure states")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("model", help="model file (or bundled: example31, maintenance)")
        p.add_argument("--exact", action="store_true",
                       help="force exact rational arithmetic")
        p.set_defaults(fn=fn)
        return p

    add("validate", _cmd_validate, "validate a model file and print a summary")
    add("absorbing", _cmd_absorbing, "layer construction and absorbing-set split")

    p = add("solve", _cmd_solve, "optimal failure probabilities and policy")
    p.add_argument("--initial-policy", metavar="FILE",
                   help="start policy iteration from this policy file")
    p.add_argument("--improve-eps", type=float, default=1e-12,
                   help="minimal accepted improvement (float mode)")

    p = add("evaluate", _cmd_evaluate, "failure probabilities of a fixed policy")
    p.add_argument("--policy", metavar="FILE", required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iters", type=int, default=100_000)

    p = add("oracle", _cmd_oracle, "independent cross-check of the solver")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iters", type=int, default=200_000)
    p.add_argument("--enum-cap", type=int, default=1_000_000,
                   help="skip enumeration above this policy count")

    p = add("simulate", _cmd_simulate, "seeded Monte-Carlo estimate for a policy")
    p.add_argument("--policy", metavar="FILE", required=True)
    p.add_argument("--state", required=True, help="start state name")
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except RelimaxError as err:
        print(json.dumps({"error": err.to_json_dict()}, indent=2))
        print(f"error[{err.code}]: {err.message}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
