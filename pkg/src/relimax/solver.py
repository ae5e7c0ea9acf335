"""Optimal reliability: policy iteration inside the restricted policy class.

The degenerate structures answer immediately (every non-failed state can be
made permanently safe, or none can). Otherwise policies that keep F*
absorbing are evaluated through the reduced linear system on G* and improved
one state at a time; each accepted switch strictly lowers some failure
probability, so the iteration visits distinct policies and terminates. The
result is certified against the G*-restricted one-step optimality equation,
whose solution is unique, unlike the plain equation over all non-failed
states, which cannot separate the true minimal solution from larger ones.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from fractions import Fraction

from relimax.absorbing import (
    AbsorbingAnalysis,
    compute_largest_absorbing,
    membership_test,
)
from relimax.errors import (
    CertificateViolation,
    IterationBudgetExceeded,
    PolicyOutsideClass,
)
from relimax.evaluate import (
    FailureVector,
    assemble_failure_vector,
    build_reduced_system,
    make_failure_vector,
    solve_reduced,
)
from relimax.model import ModelSpec, StationaryPolicy, format_prob


class Termination(enum.Enum):
    CONVERGED = "converged"
    DEGENERATE_F_STAR_EMPTY = "degenerate_f_star_empty"
    DEGENERATE_G_STAR_EMPTY = "degenerate_g_star_empty"


@dataclass(frozen=True)
class SolveOptions:
    initial_policy: StationaryPolicy | None = None
    improve_eps: float = 1e-12     # ignored in exact mode (strict comparison)
    oe_tol: float = 1e-8
    solve_tol: float = 1e-10
    pivot_tol: float = 1e-12
    clamp_tol: float = 1e-9
    max_policy_iters: int | None = None


@dataclass(frozen=True)
class IterationRecord:
    policy: StationaryPolicy
    q: FailureVector
    improved_states: frozenset


@dataclass(frozen=True)
class SolveReport:
    analysis: AbsorbingAnalysis = field(repr=False)
    iterations: tuple[IterationRecord, ...]
    final_policy: StationaryPolicy
    q_star: FailureVector
    termination: Termination
    oe_residual: object
    wall_time_ms: float

    def to_json_dict(self) -> dict:
        model = self.analysis.model
        names = model.state_names
        one = Fraction(1) if model.is_exact else 1.0
        return {
            "analysis": self.analysis.to_json_dict(),
            "iterations": [
                {
                    "policy": rec.policy.to_name_dict(model),
                    "q": rec.q.to_json_dict(model),
                    "improved_states": [names[i] for i in sorted(rec.improved_states)],
                }
                for rec in self.iterations
            ],
            "final_policy": self.final_policy.to_name_dict(model),
            "q_star": self.q_star.to_json_dict(model),
            "r_star": {names[i]: format_prob(one - v)
                       for i, v in enumerate(self.q_star.values)},
            "termination": self.termination.value,
            "oe_residual": (str(self.oe_residual) if model.is_exact
                            else float(self.oe_residual)),
            "wall_time_ms": self.wall_time_ms,
        }


def _one_step_cost(model: ModelSpec, i: int, a: int, q: FailureVector, over) -> object:
    """p(failed | i, a) plus the q-mass the row leaves on `over`."""
    row = model.rows[(i, a)]
    acc = model.failure_mass(i, a)
    for j in over:
        if row[j] != 0:
            acc = acc + row[j] * q[j]
    return acc


def improve_policy(model: ModelSpec, analysis: AbsorbingAnalysis,
                   policy: StationaryPolicy, q: FailureVector,
                   improve_eps: float = 1e-12):
    """One improvement pass: in every intermediate-risk state, switch to the
    cheapest action that beats the current value by more than improve_eps
    (strictly, in exact mode). Returns (new policy, switched state ids).

    Expects q to be the evaluation of `policy`; actions outside G* never
    change, so membership in the restricted class is preserved.
    """
    threshold = 0 if model.is_exact else improve_eps
    over = sorted(analysis.g_star)
    choice = list(policy.choice)
    improved = set()
    for i in over:
        best_a = None
        best_w = None
        for a in analysis.restricted_actions[i]:
            w = _one_step_cost(model, i, a, q, over)
            if (q[i] - w) > threshold and (best_w is None or w < best_w):
                best_a, best_w = a, w
        if best_a is not None:
            choice[i] = best_a
            improved.add(i)
    return StationaryPolicy(tuple(choice)), frozenset(improved)


def check_improved_oe(model: ModelSpec, analysis: AbsorbingAnalysis,
                      q: FailureVector):
    """Sup-norm residual of the G*-restricted one-step optimality equation.

    The restriction sums q only over G*; on G* this equation has a unique
    solution, making a small residual an optimality certificate. Returns 0
    when G* is empty.
    """
    over = sorted(analysis.g_star)
    worst = Fraction(0) if model.is_exact else 0.0
    for i in over:
        best = min(_one_step_cost(model, i, a, q, over)
                   for a in model.actions_of[i])
        worst = max(worst, abs(q[i] - best))
    return worst


def check_plain_oe(model: ModelSpec, q: FailureVector):
    """Sup-norm residual of the plain one-step optimality equation over all
    non-failed states. Zero residual does NOT certify optimality: the plain
    equation admits solutions larger than the minimal one."""
    safe = model.safe_states
    worst = Fraction(0) if model.is_exact else 0.0
    for i in safe:
        best = min(_one_step_cost(model, i, a, q, safe)
                   for a in model.actions_of[i])
        worst = max(worst, abs(q[i] - best))
    return worst


def _certify(model: ModelSpec, analysis: AbsorbingAnalysis, q: FailureVector,
             oe_tol: float):
    residual = check_improved_oe(model, analysis, q)
    if model.is_exact:
        if residual != 0:
            raise CertificateViolation(
                f"exact optimality residual is {residual}, expected 0",
                residual=str(residual))
    elif residual > oe_tol:
        raise CertificateViolation(
            f"optimality residual {residual!r} exceeds {oe_tol}",
            residual=float(residual), tol=oe_tol)
    return residual


def solve(model: ModelSpec, options: SolveOptions | None = None) -> SolveReport:
    """Compute minimal failure probabilities and an optimal stationary policy.

    Runs the layer construction, answers degenerate splits directly, and
    otherwise iterates evaluate/improve from the lexicographically first
    policy of the restricted class (or options.initial_policy, which must
    belong to the class). The returned q_star is certified against the
    restricted one-step optimality equation before returning.
    """
    opts = options or SolveOptions()
    t0 = time.perf_counter()
    analysis = compute_largest_absorbing(model)
    one = Fraction(1) if model.is_exact else 1.0
    zero = Fraction(0) if model.is_exact else 0.0

    if not analysis.f_star:
        q_star = make_failure_vector(model, {i: one for i in model.safe_states})
        residual = _certify(model, analysis, q_star, opts.oe_tol)
        return SolveReport(
            analysis=analysis, iterations=(),
            final_policy=analysis.first_restricted_policy(),
            q_star=q_star, termination=Termination.DEGENERATE_F_STAR_EMPTY,
            oe_residual=residual,
            wall_time_ms=(time.perf_counter() - t0) * 1e3)

    if not analysis.g_star:
        q_star = make_failure_vector(model, {i: zero for i in model.safe_states})
        residual = _certify(model, analysis, q_star, opts.oe_tol)
        return SolveReport(
            analysis=analysis, iterations=(),
            final_policy=analysis.first_restricted_policy(),
            q_star=q_star, termination=Termination.DEGENERATE_G_STAR_EMPTY,
            oe_residual=residual,
            wall_time_ms=(time.perf_counter() - t0) * 1e3)

    if opts.initial_policy is not None:
        g = opts.initial_policy
        if not membership_test(analysis, g):
            raise PolicyOutsideClass(
                "initial policy does not keep the maximal absorbing set absorbing")
    else:
        g = analysis.first_restricted_policy()

    bound = max(analysis.restricted_class_size(), opts.max_policy_iters or 0)
    records: list[IterationRecord] = []
    while True:
        system = build_reduced_system(model, analysis, g)
        solved = solve_reduced(system, solve_tol=opts.solve_tol,
                               pivot_tol=opts.pivot_tol, clamp_tol=opts.clamp_tol)
        q = assemble_failure_vector(model, analysis, solved)
        g_next, improved = improve_policy(model, analysis, g, q,
                                          improve_eps=opts.improve_eps)
        records.append(IterationRecord(policy=g, q=q, improved_states=improved))
        if g_next == g:
            break
        if len(records) >= bound:
            raise IterationBudgetExceeded(
                f"exceeded {bound} policy-iteration rounds; the improvement "
                f"step should have terminated", bound=bound)
        g = g_next

    q_star = records[-1].q
    residual = _certify(model, analysis, q_star, opts.oe_tol)
    # actions on failed states are irrelevant; report the smallest id there
    choice = list(g.choice)
    for i in model.failed_states:
        choice[i] = model.actions_of[i][0]
    return SolveReport(
        analysis=analysis, iterations=tuple(records),
        final_policy=StationaryPolicy(tuple(choice)),
        q_star=q_star, termination=Termination.CONVERGED, oe_residual=residual,
        wall_time_ms=(time.perf_counter() - t0) * 1e3)
