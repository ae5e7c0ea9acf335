"""Policy evaluation: failure probabilities of a fixed stationary policy.

Two routes, deliberately independent:

* the reduced linear system on the intermediate-risk states G*, valid for
  policies that keep F* absorbing (build_reduced_system / solve_reduced /
  assemble_failure_vector), and
* the monotone fixed-point iteration from zero (evaluate_policy_pes), valid
  for every policy; its iterates x(n) equal the probability of failing
  within n steps, so the limit is the minimal nonnegative solution of the
  policy's one-step equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from relimax import linalg
from relimax._kernels import pes_fixed_point
from relimax.absorbing import AbsorbingAnalysis, membership_test
from relimax.errors import (
    CoverageMismatch,
    EmptyGStar,
    NotConverged,
    OutOfRangeSolution,
    PolicyOutsideClass,
)
from relimax.model import ModelSpec, StationaryPolicy, format_prob


@dataclass(frozen=True)
class FailureVector:
    """Failure probability per state; identically 1 on the failed set."""

    values: tuple

    def __getitem__(self, i: int):
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)

    def reliability(self, i: int):
        return 1 - self.values[i]

    def sup_gap(self, other: "FailureVector"):
        return max(abs(a - b) for a, b in zip(self.values, other.values))

    def to_name_dict(self, model: ModelSpec) -> dict:
        return {model.state_names[i]: v for i, v in enumerate(self.values)}

    def to_json_dict(self, model: ModelSpec) -> dict:
        return {model.state_names[i]: format_prob(v)
                for i, v in enumerate(self.values)}


@dataclass(frozen=True)
class ReducedSystem:
    """Linear system x = P x + v on the intermediate-risk states.

    index_map fixes the ascending state-id order of rows and columns;
    matrix/vector entries are floats or Fractions according to `exact`.
    """

    index_map: tuple[int, ...]
    p_gstar: tuple
    v_b: tuple
    exact: bool = field(compare=False)


def make_failure_vector(model: ModelSpec, safe_values: Mapping[int, object]) -> FailureVector:
    one = Fraction(1) if model.is_exact else 1.0
    values = [one] * model.n_states
    for i, v in safe_values.items():
        values[i] = v
    return FailureVector(tuple(values))


def build_reduced_system(model: ModelSpec, analysis: AbsorbingAnalysis,
                         policy: StationaryPolicy) -> ReducedSystem:
    """Extract x = P x + v on G* for a policy that keeps F* absorbing.

    Raises PolicyOutsideClass when it does not, EmptyGStar when there are no
    intermediate-risk states to solve for.
    """
    if not membership_test(analysis, policy):
        raise PolicyOutsideClass(
            "policy does not keep the maximal absorbing set absorbing")
    if not analysis.g_star:
        raise EmptyGStar("no intermediate-risk states; use the degenerate answers")

    order = tuple(sorted(analysis.g_star))
    failed = sorted(model.failed_states)
    matrix = []
    v_b = []
    for i in order:
        row = model.rows[(i, policy.choice[i])]
        matrix.append(tuple(row[j] for j in order))
        v_b.append(sum(row[j] for j in failed))
    return ReducedSystem(index_map=order, p_gstar=tuple(matrix), v_b=tuple(v_b),
                         exact=model.is_exact)


def solve_reduced(system: ReducedSystem, solve_tol: float = 1e-10,
                  pivot_tol: float = 1e-12, clamp_tol: float = 1e-9) -> dict:
    """Solve (I - P) x = v; returns {state id: probability} on G*.

    Float mode pivots with pivot_tol and clamps results into [0, 1] when they
    stray by at most clamp_tol; exact mode solves over the rationals and
    accepts only literal probabilities. solve_tol bounds the float residual,
    checked via reduced_residual by callers and tests.
    """
    n = len(system.index_map)
    if system.exact:
        a = [[(Fraction(1) if r == c else Fraction(0)) - system.p_gstar[r][c]
              for c in range(n)] for r in range(n)]
        x = linalg.exact_solve(a, list(system.v_b))
        for i, v in zip(system.index_map, x):
            if v < 0 or v > 1:
                raise OutOfRangeSolution(f"solved value {v} at state id {i} "
                                         f"is not a probability", state=i)
        return dict(zip(system.index_map, x))

    a = np.eye(n) - np.array(system.p_gstar, dtype=np.float64)
    x = linalg.gauss_solve(a, np.array(system.v_b, dtype=np.float64),
                           pivot_tol=pivot_tol)
    out = {}
    for i, v in zip(system.index_map, x):
        fv = float(v)
        if fv < -clamp_tol or fv > 1.0 + clamp_tol:
            raise OutOfRangeSolution(
                f"solved value {fv!r} at state id {i} leaves [0,1] beyond {clamp_tol}",
                state=i, value=fv)
        out[i] = min(max(fv, 0.0), 1.0)
    return out


def reduced_residual(system: ReducedSystem, solved: Mapping[int, object]):
    """Sup-norm residual of (I - P) x - v for solved values on G*."""
    if not system.index_map:
        return Fraction(0) if system.exact else 0.0
    x = [solved[i] for i in system.index_map]
    worst = Fraction(0) if system.exact else 0.0
    for r in range(len(x)):
        acc = x[r] - system.v_b[r]
        for c in range(len(x)):
            acc -= system.p_gstar[r][c] * x[c]
        worst = max(worst, abs(acc))
    return worst


def assemble_failure_vector(model: ModelSpec, analysis: AbsorbingAnalysis,
                            solved: Mapping[int, object]) -> FailureVector:
    """Assemble the full vector: 1 on failed states, 0 on F*, solved on G*."""
    if set(solved) != set(analysis.g_star):
        raise CoverageMismatch(
            "solved values must cover exactly the intermediate-risk states",
            missing=set(analysis.g_star) - set(solved),
            extra=set(solved) - set(analysis.g_star))
    zero = Fraction(0) if model.is_exact else 0.0
    safe_values = {i: zero for i in analysis.f_star}
    safe_values.update(solved)
    return make_failure_vector(model, safe_values)


def _generic_sweep(model: ModelSpec, policy: StationaryPolicy, x: dict) -> dict:
    """One application of the policy's one-step failure map on safe states."""
    failed = sorted(model.failed_states)
    out = {}
    for i in model.safe_states:
        row = model.rows[(i, policy.choice[i])]
        acc = sum(row[j] for j in failed)
        for j in model.safe_states:
            if row[j] != 0:
                acc = acc + row[j] * x[j]
        out[i] = acc
    return out


def finite_horizon_failure(model: ModelSpec, policy: StationaryPolicy, n: int) -> FailureVector:
    """Probability of failing within n steps: n sweeps of the map from zero."""
    model.check_policy(policy)
    zero = Fraction(0) if model.is_exact else 0.0
    x = {i: zero for i in model.safe_states}
    for _ in range(n):
        x = _generic_sweep(model, policy, x)
    return make_failure_vector(model, x)


def evaluate_policy_pes(model: ModelSpec, policy: StationaryPolicy,
                        tol: float = 1e-12, max_iters: int = 100_000) -> FailureVector:
    """Minimal nonnegative solution of the policy's one-step failure equation.

    Iterates from zero, so the limit is P(ever fail) even when the equation
    has larger solutions. Float mode stops when the sup-norm step gap drops
    to tol; exact mode stops only when an iterate repeats exactly (which at
    most happens for terminating models) and raises NotConverged otherwise.
    """
    model.check_policy(policy)
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")

    if model.is_exact:
        x = {i: Fraction(0) for i in model.safe_states}
        for _ in range(max_iters):
            xn = _generic_sweep(model, policy, x)
            if xn == x:
                return make_failure_vector(model, x)
            x = xn
        gap = "unknown"
        raise NotConverged(
            f"no exact fixed point after {max_iters} sweeps", iterations=max_iters,
            gap=gap)

    packed = model.packed()
    pidx = np.array([packed.pair_index[(i, policy.choice[i])] for i in packed.safe],
                    dtype=np.int64)
    x, iters, gap = pes_fixed_point(packed.pair_rows, packed.pair_b, pidx,
                                    tol, max_iters)
    if gap > tol:
        raise NotConverged(
            f"step gap {gap!r} above tolerance {tol} after {iters} sweeps",
            iterations=iters, gap=gap)
    return make_failure_vector(model, dict(zip(packed.safe.tolist(), x.tolist())))
