"""Independent ground-truth routes used to cross-check the solver.

Three routes, none sharing code with the policy-iteration path:

* value iteration from zero on the one-step minimum map (its iterates are
  the optimal n-step failure probabilities, so the limit is the minimal
  failure probability vector);
* exhaustive policy enumeration, evaluating every stationary policy with the
  monotone fixed-point evaluator and taking the componentwise minimum;
* seeded Monte-Carlo simulation of a fixed policy over a finite horizon.

The simulator draws from numpy's Philox4x64-10 counter-based generator. At
each time step it draws one block of `trials` uniforms; trajectory t always
reads slot t. A trajectory's stream therefore depends only on (seed, trials,
t), never on the horizon or on other trajectories' absorption times: repeat
runs are bit-identical and estimates are nondecreasing in the horizon.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from relimax._kernels import simulate_step, vi_fixed_point
from relimax.errors import NoUniformMinimizer, NotConverged, TooManyPolicies
from relimax.evaluate import FailureVector, evaluate_policy_pes, make_failure_vector
from relimax.model import ModelSpec, StationaryPolicy, policy_space_size

RNG_FAMILY = "philox4x64-10"
RNG_LAYOUT = "per-step blocks of `trials` uniforms; trajectory t reads slot t"


@dataclass(frozen=True)
class OracleResult:
    q_star_vi: FailureVector
    iterations_used: int
    residual_gap: float
    best_policy_enum: StationaryPolicy | None
    q_star_enum: FailureVector | None

    def to_json_dict(self, model: ModelSpec) -> dict:
        return {
            "q_star_vi": self.q_star_vi.to_json_dict(model),
            "iterations_used": self.iterations_used,
            "residual_gap": (str(self.residual_gap) if model.is_exact
                             else float(self.residual_gap)),
            "best_policy_enum": (self.best_policy_enum.to_name_dict(model)
                                 if self.best_policy_enum is not None else None),
            "q_star_enum": (self.q_star_enum.to_json_dict(model)
                            if self.q_star_enum is not None else None),
        }


@dataclass(frozen=True)
class SimulationEstimate:
    state: int
    horizon: int
    trials: int
    hit_count: int
    estimate: float
    half_width_95: float
    seed: int

    def to_json_dict(self, model: ModelSpec) -> dict:
        return {
            "state": model.state_names[self.state],
            "horizon": self.horizon,
            "trials": self.trials,
            "hit_count": self.hit_count,
            "estimate": self.estimate,
            "half_width_95": self.half_width_95,
            "seed": self.seed,
            "rng": {"family": RNG_FAMILY, "layout": RNG_LAYOUT},
        }


def _vi_exact(model: ModelSpec, max_iters: int):
    safe = model.safe_states
    failed = sorted(model.failed_states)
    x = {i: Fraction(0) for i in safe}
    for it in range(1, max_iters + 1):
        xn = {}
        for i in safe:
            best = None
            for a in model.actions_of[i]:
                row = model.rows[(i, a)]
                acc = sum(row[j] for j in failed)
                for j in safe:
                    if row[j] != 0:
                        acc += row[j] * x[j]
                if best is None or acc < best:
                    best = acc
            xn[i] = best
        if xn == x:
            return x, it, Fraction(0)
        x = xn
    raise NotConverged(f"no exact fixed point after {max_iters} sweeps",
                       iterations=max_iters)


def _vi_detail(model: ModelSpec, tol: float, max_iters: int):
    if model.is_exact:
        x, iters, gap = _vi_exact(model, max_iters)
        return make_failure_vector(model, x), iters, gap

    packed = model.packed()
    x, iters, gap = vi_fixed_point(packed.pair_rows, packed.pair_b,
                                   packed.state_start, tol, max_iters)
    if gap > tol:
        raise NotConverged(
            f"step gap {gap!r} above tolerance {tol} after {iters} sweeps",
            iterations=iters, gap=gap)
    return (make_failure_vector(model, dict(zip(packed.safe.tolist(), x.tolist()))),
            iters, gap)


def value_iterate_oe(model: ModelSpec, tol: float = 1e-12,
                     max_iters: int = 200_000) -> FailureVector:
    """Minimal failure probabilities by value iteration from zero.

    Iterate n equals the best achievable probability of failing within n
    steps, so the limit is the minimal solution of the one-step optimality
    equation, not some larger solution. Exact mode stops only on an exact
    repeat and raises NotConverged otherwise.
    """
    fv, _, _ = _vi_detail(model, tol, max_iters)
    return fv


def enumerate_and_minimize(model: ModelSpec, tol: float = 1e-12,
                           cap: int = 1_000_000,
                           uniform_tol: float = 1e-9):
    """Evaluate every stationary policy; return the one attaining the
    componentwise minimum and its failure vector.

    Policies are scanned in lexicographic order of action ids, so ties go to
    the lexicographically first minimizer. Raises TooManyPolicies when the
    policy space exceeds the cap and NoUniformMinimizer if no single policy
    matches the componentwise minimum everywhere (within uniform_tol in
    float mode), which would contradict the existence of an optimal
    stationary policy.
    """
    size = policy_space_size(model)
    if size > cap:
        raise TooManyPolicies(f"policy space holds {size} policies, cap is {cap}",
                              size=size, cap=cap)

    slack = 0 if model.is_exact else uniform_tol
    evaluated = []
    minimum = None
    for choice in itertools.product(*model.actions_of):
        policy = StationaryPolicy(choice)
        q = evaluate_policy_pes(model, policy, tol=tol)
        evaluated.append((policy, q))
        if minimum is None:
            minimum = list(q.values)
        else:
            minimum = [min(m, v) for m, v in zip(minimum, q.values)]

    for policy, q in evaluated:
        if all(v - m <= slack for v, m in zip(q.values, minimum)):
            return policy, q
    raise NoUniformMinimizer(
        "no policy attains the componentwise minimum in every state",
        uniform_tol=uniform_tol)


def run_oracle(model: ModelSpec, tol: float = 1e-12, max_iters: int = 200_000,
               cap: int = 1_000_000) -> OracleResult:
    """Value iteration always; enumeration when the policy space fits the cap."""
    q_vi, iters, gap = _vi_detail(model, tol, max_iters)
    best = q_enum = None
    if policy_space_size(model) <= cap:
        best, q_enum = enumerate_and_minimize(model, tol=tol, cap=cap)
    return OracleResult(q_star_vi=q_vi, iterations_used=iters, residual_gap=gap,
                        best_policy_enum=best, q_star_enum=q_enum)


def simulate_survival(model: ModelSpec, policy: StationaryPolicy, state: int,
                      horizon: int, trials: int, seed: int) -> SimulationEstimate:
    """Monte-Carlo estimate of P(fail within `horizon` steps | start state).

    The estimate approaches the policy's failure probability from below as
    the horizon grows. Kernel rows are converted to float64 for sampling in
    either arithmetic mode (an estimate is inherently a float); exactness
    guarantees apply to the solver and evaluator paths, not here. Fixing the
    seed fixes the result exactly; see the module docstring for the stream
    layout.
    """
    model.check_policy(policy)
    if not 0 <= state < model.n_states:
        raise ValueError(f"state id {state} out of range")
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if trials < 1:
        raise ValueError("trials must be >= 1")

    n = model.n_states
    if state in model.failed_states:
        hits = trials
    else:
        cum = np.zeros((n, n), dtype=np.float64)
        for i in range(n):
            if i in model.failed_states:
                cum[i, i:] = 1.0            # never consumed: trajectories stop
            else:
                row = model.rows[(i, policy.choice[i])]
                cum[i] = np.cumsum([float(v) for v in row])
        failed_mask = np.zeros(n, dtype=np.uint8)
        failed_mask[sorted(model.failed_states)] = 1

        cur = np.full(trials, state, dtype=np.int64)
        alive = np.ones(trials, dtype=np.uint8)
        rng = np.random.Generator(np.random.Philox(seed))
        hits = 0
        for _ in range(horizon):
            if not alive.any():
                break
            u = rng.random(trials)
            hits += simulate_step(cum, failed_mask, cur, alive, u)

    estimate = hits / trials
    half_width = 1.96 * math.sqrt(max(estimate * (1.0 - estimate), 0.0) / trials)
    return SimulationEstimate(state=state, horizon=horizon, trials=trials,
                              hit_count=hits, estimate=estimate,
                              half_width_95=half_width, seed=seed)
