"""Shared fixtures: bundled example models, a four-state trap variant, and a
session-wide sweep of random models with solver and oracle results attached.

The sweep is computed once and reused by the acceptance gate and the property
tests, so the expensive part (500 solves plus two independent oracles) runs a
single time per session.
"""

from __future__ import annotations

import contextlib
import time
from dataclasses import dataclass

import numpy as np
import pytest

from relimax.absorbing import (
    PolicyAbsorption,
    absorbing_set_of_policy,
    membership_test,
)
from relimax.bundled import example31_spec, maintenance_spec
from relimax.evaluate import FailureVector, evaluate_policy_pes
from relimax.model import ModelSpec, StationaryPolicy, validate_model
from relimax.oracle import enumerate_and_minimize, value_iterate_oe
from relimax.solver import SolveReport, solve
from relimax.testing import random_model, random_policy

SWEEP_SEED = 20260822
SWEEP_SIZE = 500


# -- small fixed models -------------------------------------------------------

def trap4_raw(arithmetic: str = "float") -> dict:
    """Trap model with a genuinely risky state.

    `steady` and `spare` can stand still forever (action c) or jump to the
    failed state (action d); `feeder` has a single action that fails half
    the time and otherwise lands in `steady`. The all-ones vector is a fixed
    point of the single-policy balance equation under all-c, yet the minimal
    failure probabilities are (0, 0, 1/2): iterating from above converges to
    the wrong answer, and only the equation restricted to the risky states
    tells the two apart.
    """
    return {
        "states": ["down", "steady", "spare", "feeder"],
        "failed": ["down"],
        "actions": {
            "down": ["c"],
            "steady": ["c", "d"],
            "spare": ["c", "d"],
            "feeder": ["c"],
        },
        "transitions": {
            "down|c": {"down": 1},
            "steady|c": {"steady": 1},
            "steady|d": {"down": 1},
            "spare|c": {"spare": 1},
            "spare|d": {"down": 1},
            "feeder|c": {"down": 0.5, "steady": 0.5},
        },
        "arithmetic": arithmetic,
    }


@pytest.fixture(scope="session")
def ex31_float() -> ModelSpec:
    return validate_model(example31_spec())


@pytest.fixture(scope="session")
def ex31_exact() -> ModelSpec:
    return validate_model(example31_spec(arithmetic="exact"))


@pytest.fixture(scope="session")
def trap4_float() -> ModelSpec:
    return validate_model(trap4_raw())


@pytest.fixture(scope="session")
def trap4_exact() -> ModelSpec:
    return validate_model(trap4_raw(arithmetic="exact"))


# regime where staying with crew c everywhere is optimal
REGIME_A = dict(alpha0="1/4", alpha1="1/4",
                beta0="1/2", beta1="3/10", theta0="2/5", theta1="1/5")
# regime where one improvement step switches both choice states to crew d
REGIME_B = dict(alpha0="1/4", alpha1="1/4",
                beta0="1/5", beta1="1/5", theta0="1/2", theta1="3/10")


@pytest.fixture(scope="session")
def maint_a_float() -> ModelSpec:
    return validate_model(maintenance_spec(**REGIME_A))


@pytest.fixture(scope="session")
def maint_a_exact() -> ModelSpec:
    return validate_model(maintenance_spec(**REGIME_A, arithmetic="exact"))


@pytest.fixture(scope="session")
def maint_b_float() -> ModelSpec:
    return validate_model(maintenance_spec(**REGIME_B))


@pytest.fixture(scope="session")
def maint_b_exact() -> ModelSpec:
    return validate_model(maintenance_spec(**REGIME_B, arithmetic="exact"))


@pytest.fixture(scope="session")
def maint_a_report(maint_a_float) -> SolveReport:
    return solve(maint_a_float)


@pytest.fixture(scope="session")
def maint_b_report(maint_b_float) -> SolveReport:
    return solve(maint_b_float)


# -- random sweep -------------------------------------------------------------

@dataclass
class SweepRecord:
    model: ModelSpec
    report: SolveReport
    q_vi: FailureVector
    enum_policy: StationaryPolicy
    q_enum: FailureVector
    policy: StationaryPolicy          # one arbitrary (not class-aware) policy
    q_policy: FailureVector           # its minimal-solution evaluation
    absorption: PolicyAbsorption
    in_class: bool


@dataclass
class Sweep:
    records: list
    solver_oracle_seconds: float      # solve + both oracles only


@pytest.fixture(scope="session")
def sweep() -> Sweep:
    rng = np.random.default_rng(SWEEP_SEED)
    drawn = []
    for _ in range(SWEEP_SIZE):
        model = random_model(rng)
        drawn.append((model, random_policy(rng, model)))

    elapsed = 0.0
    records = []
    for model, policy in drawn:
        t0 = time.perf_counter()
        report = solve(model)
        q_vi = value_iterate_oe(model)
        enum_policy, q_enum = enumerate_and_minimize(model)
        elapsed += time.perf_counter() - t0
        records.append(SweepRecord(
            model=model, report=report, q_vi=q_vi,
            enum_policy=enum_policy, q_enum=q_enum,
            policy=policy,
            q_policy=evaluate_policy_pes(model, policy),
            absorption=absorbing_set_of_policy(model, policy),
            in_class=membership_test(report.analysis, policy),
        ))
    return Sweep(records=records, solver_oracle_seconds=elapsed)


# -- acceptance reporting -----------------------------------------------------

ACCEPTANCE_RESULTS: list[tuple[int, str, str]] = []


@contextlib.contextmanager
def criterion(number: int, label: str):
    """Record one pass/fail line for the terminal summary."""
    try:
        yield
    except BaseException:
        ACCEPTANCE_RESULTS.append((number, "FAIL", label))
        raise
    ACCEPTANCE_RESULTS.append((number, "PASS", label))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, verdict, label in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {number}: {verdict} - {label}")
