"""relimax: maximal reliability of finite controlled Markov systems.

Given a finite state set with a designated failure subset and finitely many
actions per state, the package computes the minimal probability of ever
entering the failure set, a stationary policy attaining it, and the
structural split of the non-failed states into those that can be made
permanently safe and those that cannot.
"""

from relimax._kernels import BACKEND
from relimax.absorbing import (
    AbsorbingAnalysis,
    PolicyAbsorption,
    absorbing_set_of_policy,
    compute_largest_absorbing,
    enumerate_restricted_policies,
    membership_test,
)
from relimax.evaluate import (
    FailureVector,
    ReducedSystem,
    assemble_failure_vector,
    build_reduced_system,
    evaluate_policy_pes,
    finite_horizon_failure,
    make_failure_vector,
    reduced_residual,
    solve_reduced,
)
from relimax.model import (
    ModelSpec,
    PackedModel,
    StationaryPolicy,
    load_model,
    load_policy,
    policy_from_names,
    policy_space_size,
    validate_model,
)
from relimax.oracle import (
    OracleResult,
    SimulationEstimate,
    enumerate_and_minimize,
    run_oracle,
    simulate_survival,
    value_iterate_oe,
)
from relimax.solver import (
    IterationRecord,
    SolveOptions,
    SolveReport,
    Termination,
    check_improved_oe,
    check_plain_oe,
    improve_policy,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AbsorbingAnalysis",
    "PolicyAbsorption",
    "absorbing_set_of_policy",
    "compute_largest_absorbing",
    "enumerate_restricted_policies",
    "membership_test",
    "FailureVector",
    "ReducedSystem",
    "assemble_failure_vector",
    "build_reduced_system",
    "evaluate_policy_pes",
    "finite_horizon_failure",
    "make_failure_vector",
    "reduced_residual",
    "solve_reduced",
    "ModelSpec",
    "PackedModel",
    "StationaryPolicy",
    "load_model",
    "load_policy",
    "policy_from_names",
    "policy_space_size",
    "validate_model",
    "OracleResult",
    "SimulationEstimate",
    "enumerate_and_minimize",
    "run_oracle",
    "simulate_survival",
    "value_iterate_oe",
    "IterationRecord",
    "SolveOptions",
    "SolveReport",
    "Termination",
    "check_improved_oe",
    "check_plain_oe",
    "improve_policy",
    "solve",
    "__version__",
]
