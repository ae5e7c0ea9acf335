"""Reduced-system evaluation, fixed-point evaluation, and assembly."""

from fractions import Fraction

import pytest

from relimax.absorbing import compute_largest_absorbing
from relimax.errors import (
    CoverageMismatch,
    EmptyGStar,
    NotConverged,
    OutOfRangeSolution,
    PolicyOutsideClass,
    SingularSystem,
)
from relimax.evaluate import (
    ReducedSystem,
    assemble_failure_vector,
    build_reduced_system,
    evaluate_policy_pes,
    finite_horizon_failure,
    make_failure_vector,
    reduced_residual,
    solve_reduced,
)
from relimax.model import policy_from_names, validate_model


def crew_policy(model, crew):
    return policy_from_names(model, {
        s: (crew if s in ("12", "21") else "idle") for s in model.state_names})


def all_action(model, name):
    return policy_from_names(model, {s: name for s in model.state_names})


def test_failure_vector_basics(ex31_float):
    fv = make_failure_vector(ex31_float, {1: 0.25, 2: 0.0})
    assert fv[0] == 1.0                    # failed state pinned to 1
    assert fv[1] == 0.25
    assert fv.reliability(1) == 0.75
    assert len(fv) == 3
    other = make_failure_vector(ex31_float, {1: 0.5, 2: 0.25})
    assert fv.sup_gap(other) == 0.25
    assert fv.to_name_dict(ex31_float) == {"s0": 1.0, "s1": 0.25, "s2": 0.0}


def test_reduced_system_maintenance_entries(maint_a_float):
    m = maint_a_float
    analysis = compute_largest_absorbing(m)
    system = build_reduced_system(m, analysis, crew_policy(m, "c"))
    ids = {m.state_names[i]: r for r, i in enumerate(system.index_map)}
    assert list(ids) == ["12", "21", "22"]  # ascending state-id order
    r22 = ids["22"]
    # both machines degrade independently from situation 2
    assert system.v_b[r22] == pytest.approx(1 / 16)
    assert system.p_gstar[r22][ids["22"]] == pytest.approx(1 / 4)
    assert system.p_gstar[r22][ids["12"]] == pytest.approx(1 / 8)
    assert system.p_gstar[r22][ids["21"]] == pytest.approx(1 / 8)
    for r in range(3):
        assert sum(system.p_gstar[r]) + system.v_b[r] <= 1 + 1e-12


def test_reduced_system_trivial_one_state():
    m = validate_model({
        "states": ["b", "s"],
        "failed": ["b"],
        "actions": {"b": ["a"], "s": ["a"]},
        "transitions": {"b|a": {"b": 1}, "s|a": {"b": 1}},
    })
    analysis = compute_largest_absorbing(m)
    system = build_reduced_system(m, analysis, m.first_policy())
    assert system.p_gstar == ((0.0,),)
    assert system.v_b == (1.0,)
    assert solve_reduced(system) == {1: 1.0}


def test_reduced_system_refusals(ex31_float, trap4_float):
    with pytest.raises(EmptyGStar):
        build_reduced_system(ex31_float,
                             compute_largest_absorbing(ex31_float),
                             all_action(ex31_float, "c"))
    analysis = compute_largest_absorbing(trap4_float)
    jumpy = policy_from_names(trap4_float, {
        "down": "c", "steady": "d", "spare": "c", "feeder": "c"})
    with pytest.raises(PolicyOutsideClass):
        build_reduced_system(trap4_float, analysis, jumpy)


def test_solve_reduced_trap4(trap4_float, trap4_exact):
    af = compute_largest_absorbing(trap4_float)
    sf = build_reduced_system(trap4_float, af, all_action(trap4_float, "c"))
    solved = solve_reduced(sf)
    i_feeder = trap4_float.state_id("feeder")
    assert solved == {i_feeder: 0.5}
    assert reduced_residual(sf, solved) == 0.0

    ax = compute_largest_absorbing(trap4_exact)
    sx = build_reduced_system(trap4_exact, ax, all_action(trap4_exact, "c"))
    solved_x = solve_reduced(sx)
    assert solved_x == {i_feeder: Fraction(1, 2)}
    assert reduced_residual(sx, solved_x) == 0


def test_solve_reduced_exact_maintenance(maint_a_exact):
    m = maint_a_exact
    analysis = compute_largest_absorbing(m)
    system = build_reduced_system(m, analysis, crew_policy(m, "c"))
    solved = solve_reduced(system)
    assert solved[m.state_id("12")] == Fraction(17, 154)
    assert solved[m.state_id("21")] == Fraction(17, 154)
    assert solved[m.state_id("22")] == Fraction(37, 308)
    assert reduced_residual(system, solved) == 0


def test_singular_system_rejected():
    sf = ReducedSystem(index_map=(1,), p_gstar=((1.0,),), v_b=(0.0,), exact=False)
    with pytest.raises(SingularSystem):
        solve_reduced(sf)
    sx = ReducedSystem(index_map=(1,), p_gstar=((Fraction(1),),),
                       v_b=(Fraction(0),), exact=True)
    with pytest.raises(SingularSystem):
        solve_reduced(sx)


def test_out_of_range_rejected():
    # (1 - 2) x = 1 has the non-probability solution x = -1
    sf = ReducedSystem(index_map=(1,), p_gstar=((2.0,),), v_b=(1.0,), exact=False)
    with pytest.raises(OutOfRangeSolution):
        solve_reduced(sf)
    sx = ReducedSystem(index_map=(1,), p_gstar=((Fraction(2),),),
                       v_b=(Fraction(1),), exact=True)
    with pytest.raises(OutOfRangeSolution):
        solve_reduced(sx)


def test_clamp_is_narrow():
    near = ReducedSystem(index_map=(1,), p_gstar=((0.0,),),
                         v_b=(1.0 + 1e-10,), exact=False)
    assert solve_reduced(near) == {1: 1.0}   # clamped back into range
    far = ReducedSystem(index_map=(1,), p_gstar=((0.0,),),
                        v_b=(1.0 + 1e-8,), exact=False)
    with pytest.raises(OutOfRangeSolution):
        solve_reduced(far)


def test_assemble_failure_vector(trap4_float):
    m = trap4_float
    analysis = compute_largest_absorbing(m)
    i_feeder = m.state_id("feeder")
    fv = assemble_failure_vector(m, analysis, {i_feeder: 0.5})
    assert fv.to_name_dict(m) == {"down": 1.0, "steady": 0.0,
                                  "spare": 0.0, "feeder": 0.5}
    with pytest.raises(CoverageMismatch):
        assemble_failure_vector(m, analysis, {})
    with pytest.raises(CoverageMismatch):
        assemble_failure_vector(m, analysis, {i_feeder: 0.5, 1: 0.0})


def test_assemble_degenerate_empty(ex31_float):
    analysis = compute_largest_absorbing(ex31_float)
    fv = assemble_failure_vector(ex31_float, analysis, {})
    assert fv.values == (1.0, 0.0, 0.0)


def test_pes_example31(ex31_float):
    q_still = evaluate_policy_pes(ex31_float, all_action(ex31_float, "c"))
    assert q_still.values == (1.0, 0.0, 0.0)
    q_jump = evaluate_policy_pes(ex31_float, all_action(ex31_float, "d"))
    assert q_jump.values == (1.0, 1.0, 1.0)


def test_pes_trap4_both_modes(trap4_float, trap4_exact):
    qf = evaluate_policy_pes(trap4_float, all_action(trap4_float, "c"))
    assert qf.values == (1.0, 0.0, 0.0, 0.5)
    qx = evaluate_policy_pes(trap4_exact, all_action(trap4_exact, "c"))
    assert qx.values == (Fraction(1), Fraction(0), Fraction(0), Fraction(1, 2))


def test_pes_matches_reduced_solve(maint_a_float):
    m = maint_a_float
    analysis = compute_largest_absorbing(m)
    for crew in ("c", "d"):
        g = crew_policy(m, crew)
        solved = solve_reduced(build_reduced_system(m, analysis, g))
        direct = assemble_failure_vector(m, analysis, solved)
        iterated = evaluate_policy_pes(m, g)
        assert direct.sup_gap(iterated) <= 1e-9


def test_pes_not_converged(maint_a_float, maint_a_exact):
    g = crew_policy(maint_a_float, "c")
    with pytest.raises(NotConverged):
        evaluate_policy_pes(maint_a_float, g, max_iters=3)
    # rational iterates of this model never repeat exactly
    gx = crew_policy(maint_a_exact, "c")
    with pytest.raises(NotConverged):
        evaluate_policy_pes(maint_a_exact, gx, max_iters=50)


def test_finite_horizon_monotone(trap4_float):
    g = all_action(trap4_float, "c")
    i_feeder = trap4_float.state_id("feeder")
    h0 = finite_horizon_failure(trap4_float, g, 0)
    h1 = finite_horizon_failure(trap4_float, g, 1)
    h5 = finite_horizon_failure(trap4_float, g, 5)
    assert h0.values == (1.0, 0.0, 0.0, 0.0)
    assert h1[i_feeder] == 0.5
    assert all(a <= b for a, b in zip(h1.values, h5.values))
    assert h5[i_feeder] == 0.5             # feeder resolves in one step


def test_finite_horizon_exact_mode(maint_a_exact):
    g = crew_policy(maint_a_exact, "c")
    h1 = finite_horizon_failure(maint_a_exact, g, 1)
    assert h1[maint_a_exact.state_id("22")] == Fraction(1, 16)
    h2 = finite_horizon_failure(maint_a_exact, g, 2)
    assert h2[maint_a_exact.state_id("22")] > Fraction(1, 16)


def test_failure_vector_json_uses_strings(maint_a_exact):
    g = crew_policy(maint_a_exact, "c")
    analysis = compute_largest_absorbing(maint_a_exact)
    solved = solve_reduced(build_reduced_system(maint_a_exact, analysis, g))
    fv = assemble_failure_vector(maint_a_exact, analysis, solved)
    d = fv.to_json_dict(maint_a_exact)
    assert d["12"] == "17/154"
    assert d["00"] == "1"
