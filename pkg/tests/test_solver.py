"""Policy iteration: degenerate answers, improvement, certificates."""

from fractions import Fraction

import pytest

from conftest import trap4_raw
from relimax.absorbing import compute_largest_absorbing, enumerate_restricted_policies
from relimax.errors import CertificateViolation, PolicyOutsideClass
from relimax.evaluate import evaluate_policy_pes, make_failure_vector
from relimax.model import policy_from_names, validate_model
from relimax.solver import (
    SolveOptions,
    Termination,
    _certify,
    check_improved_oe,
    check_plain_oe,
    improve_policy,
    solve,
)


def crew_policy(model, crew):
    return policy_from_names(model, {
        s: (crew if s in ("12", "21") else "idle") for s in model.state_names})


def test_degenerate_all_safe(ex31_float):
    report = solve(ex31_float)
    assert report.termination is Termination.DEGENERATE_G_STAR_EMPTY
    assert report.iterations == ()
    assert report.q_star.values == (1.0, 0.0, 0.0)
    assert report.final_policy.to_name_dict(ex31_float) == {
        "s0": "c", "s1": "c", "s2": "c"}
    assert report.oe_residual == 0.0


def test_degenerate_all_risky():
    m = validate_model({
        "states": ["b", "s"],
        "failed": ["b"],
        "actions": {"b": ["a"], "s": ["a"]},
        "transitions": {"b|a": {"b": 1}, "s|a": {"b": 0.5, "s": 0.5}},
    })
    report = solve(m)
    assert report.termination is Termination.DEGENERATE_F_STAR_EMPTY
    assert report.q_star.values == (1.0, 1.0)
    assert report.oe_residual == 0.0


def test_maintenance_regime_a(maint_a_report, maint_a_float):
    report = maint_a_report
    m = maint_a_float
    assert report.termination is Termination.CONVERGED
    assert len(report.iterations) == 1
    assert report.iterations[0].improved_states == frozenset()
    final = report.final_policy.to_name_dict(m)
    assert final["12"] == "c" and final["21"] == "c"
    assert report.q_star[m.state_id("12")] == pytest.approx(17 / 154, abs=1e-12)
    assert report.q_star[m.state_id("22")] == pytest.approx(37 / 308, abs=1e-12)


def test_maintenance_regime_a_exact(maint_a_exact):
    report = solve(maint_a_exact)
    m = maint_a_exact
    assert report.q_star[m.state_id("12")] == Fraction(17, 154)
    assert report.q_star[m.state_id("21")] == Fraction(17, 154)
    assert report.q_star[m.state_id("22")] == Fraction(37, 308)
    assert report.oe_residual == 0


def test_maintenance_regime_b_switches_once(maint_b_report, maint_b_float):
    report = maint_b_report
    m = maint_b_float
    assert report.termination is Termination.CONVERGED
    assert len(report.iterations) == 2
    first, last = report.iterations
    assert {m.state_names[i] for i in first.improved_states} == {"12", "21"}
    assert last.improved_states == frozenset()
    final = report.final_policy.to_name_dict(m)
    assert final["12"] == "d" and final["21"] == "d"
    # closed form with the service law of crew d at theta0=1/2, theta1=3/10
    t0, t1 = 0.5, 0.3
    expected = (6 - 5 * t0 - 6 * t1) / (2 * (12 - 5 * t0 - 6 * t1))
    assert report.q_star[m.state_id("12")] == pytest.approx(expected, abs=1e-12)


def test_improvement_is_monotone(maint_b_report):
    q0, q1 = (rec.q for rec in maint_b_report.iterations)
    assert all(b <= a for a, b in zip(q0.values, q1.values))
    assert any(a - b > 1e-12 for a, b in zip(q0.values, q1.values))


def test_improve_policy_mechanics(maint_a_float, maint_b_float):
    for m, expect_switch in ((maint_a_float, False), (maint_b_float, True)):
        analysis = compute_largest_absorbing(m)
        g = crew_policy(m, "c")
        q = evaluate_policy_pes(m, g)
        g_next, improved = improve_policy(m, analysis, g, q)
        if expect_switch:
            assert {m.state_names[i] for i in improved} == {"12", "21"}
            assert g_next.to_name_dict(m)["12"] == "d"
        else:
            assert improved == frozenset()
            assert g_next == g


def test_improvement_tie_breaks_to_smallest_id():
    m = validate_model({
        "states": ["b", "f", "x"],
        "failed": ["b"],
        "actions": {"b": ["n"], "f": ["n"], "x": ["bad", "g1", "g2"]},
        "transitions": {
            "b|n": {"b": 1},
            "f|n": {"f": 1},
            "x|bad": {"b": 1},
            "x|g1": {"b": 0.5, "f": 0.5},
            "x|g2": {"b": 0.5, "f": 0.5},
        },
    })
    report = solve(m, SolveOptions(
        initial_policy=policy_from_names(m, {"b": "n", "f": "n", "x": "bad"})))
    assert report.final_policy.to_name_dict(m)["x"] == "g1"
    assert report.q_star[m.state_id("x")] == 0.5
    assert len(report.iterations) == 2


def test_initial_policy_must_be_in_class(trap4_float):
    jumpy = policy_from_names(trap4_float, {
        "down": "c", "steady": "d", "spare": "c", "feeder": "c"})
    with pytest.raises(PolicyOutsideClass):
        solve(trap4_float, SolveOptions(initial_policy=jumpy))


def test_start_independence_maintenance(maint_a_float, maint_a_report):
    analysis = maint_a_report.analysis
    for g in enumerate_restricted_policies(analysis):
        report = solve(maint_a_float, SolveOptions(initial_policy=g))
        assert report.q_star.sup_gap(maint_a_report.q_star) <= 1e-12
        final = report.final_policy.to_name_dict(maint_a_float)
        assert final["12"] == "c" and final["21"] == "c"


def test_final_policy_normalizes_failed_state_action():
    raw = trap4_raw()
    raw["actions"]["down"] = ["c", "d"]
    raw["transitions"]["down|d"] = {"down": 1}
    m = validate_model(raw)
    start = policy_from_names(m, {"down": "d", "steady": "c",
                                  "spare": "c", "feeder": "c"})
    report = solve(m, SolveOptions(initial_policy=start))
    assert report.termination is Termination.CONVERGED
    assert report.final_policy.to_name_dict(m)["down"] == "c"


def test_oe_checks_on_trap4(trap4_float):
    m = trap4_float
    analysis = compute_largest_absorbing(m)
    q_min = make_failure_vector(m, {m.state_id("steady"): 0.0,
                                    m.state_id("spare"): 0.0,
                                    m.state_id("feeder"): 0.5})
    ones = make_failure_vector(m, {i: 1.0 for i in m.safe_states})
    # the all-ones vector satisfies the plain equation as well as the true
    # minimum does; only the risky-state restriction separates them
    assert check_plain_oe(m, q_min) == 0.0
    assert check_plain_oe(m, ones) == 0.0
    assert check_improved_oe(m, analysis, q_min) == 0.0
    assert check_improved_oe(m, analysis, ones) == 0.5


def test_certificate_rejects_wrong_vector(trap4_float):
    m = trap4_float
    analysis = compute_largest_absorbing(m)
    ones = make_failure_vector(m, {i: 1.0 for i in m.safe_states})
    with pytest.raises(CertificateViolation):
        _certify(m, analysis, ones, oe_tol=1e-8)


def test_certificate_rejects_wrong_vector_exact(trap4_exact):
    m = trap4_exact
    analysis = compute_largest_absorbing(m)
    ones = make_failure_vector(m, {i: Fraction(1) for i in m.safe_states})
    with pytest.raises(CertificateViolation):
        _certify(m, analysis, ones, oe_tol=1e-8)


def test_report_json_shape(maint_b_report, maint_b_float):
    d = maint_b_report.to_json_dict()
    assert d["termination"] == "converged"
    assert len(d["iterations"]) == 2
    assert d["iterations"][0]["improved_states"] == ["12", "21"]
    assert set(d["q_star"]) == set(maint_b_float.state_names)
    assert d["r_star"]["00"] == "0"
    assert d["wall_time_ms"] >= 0.0
    assert float(d["oe_residual"]) <= 1e-8


def test_exact_report_serializes_rationals(maint_a_exact):
    d = solve(maint_a_exact).to_json_dict()
    assert d["q_star"]["12"] == "17/154"
    assert d["r_star"]["12"] == "137/154"
    assert d["oe_residual"] == "0"
