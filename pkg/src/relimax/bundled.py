"""Builders for the two bundled example models.

``python -m relimax.bundled OUTDIR`` regenerates the JSON files shipped in
``relimax/data`` (and is the supported way to produce maintenance models
with other parameter values). All probabilities are emitted as rational
strings so the same file serves float and exact mode.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

def example31_spec(arithmetic: str = "float") -> dict:
    """Trap example: in every state, action c stands still and action d
    jumps straight to the failed state. Standing still everywhere is optimal
    (never fails); jumping everywhere satisfies the plain one-step optimality
    equation with value 1, which is why that equation alone cannot be
    trusted."""
    states = ["s0", "s1", "s2"]
    transitions = {}
    for s in states:
        transitions[f"{s}|c"] = {s: 1}
        transitions[f"{s}|d"] = {"s0": 1}
    return {
        "states": states,
        "failed": ["s0"],
        "actions": {s: ["c", "d"] for s in states},
        "transitions": transitions,
        "arithmetic": arithmetic,
    }


def maintenance_spec(alpha0="1/4", alpha1="1/4", beta0="1/2", beta1="3/10",
                     theta0="2/5", theta1="1/5", arithmetic: str = "float") -> dict:
    """Two-machine maintenance model, nine states "xy" (machine 1 in
    situation x, machine 2 in situation y), failed state "00".

    A machine in situation 2 degrades on its own: to 1 with prob alpha0, to
    0 with prob alpha1, else stays. A machine in situation 1 is serviced by
    the chosen crew: crew c moves it to 2 with prob beta0, keeps it at 1
    with prob beta1, else drops it to 0; crew d likewise with theta0/theta1.
    Only states "12" and "21" offer a choice (one machine of each kind);
    once any machine sits in situation 0 the system idles in place, and in
    "22" both machines degrade independently. Machines move simultaneously
    and independently, so rows are products of the per-machine laws.

    Defaults are the regime where keeping crew c everywhere is optimal:
    5*beta0 + 6*beta1 = 4.3 >= 3.2 = 5*theta0 + 6*theta1.
    """
    a0, a1 = Fraction(alpha0), Fraction(alpha1)
    b0, b1 = Fraction(beta0), Fraction(beta1)
    t0, t1 = Fraction(theta0), Fraction(theta1)
    for x, y in ((a0, a1), (b0, b1), (t0, t1)):
        if x < 0 or y < 0 or x + y > 1:
            raise ValueError("each parameter pair must be nonnegative with sum <= 1")

    def service_law(up, stay):                 # situation 1 under a crew
        return {2: up, 1: stay, 0: 1 - up - stay}

    degrade_law = {2: 1 - a0 - a1, 1: a0, 0: a1}   # situation 2, autonomous

    def product_row(law1, law2):
        row = {}
        for x, px in law1.items():
            for y, py in law2.items():
                if px * py != 0:
                    row[f"{x}{y}"] = str(px * py)
        return row

    states = [f"{x}{y}" for x in range(3) for y in range(3)]
    idle_states = ["00", "01", "02", "10", "11", "20"]
    actions = {s: (["c", "d"] if s in ("12", "21") else ["idle"]) for s in states}

    transitions = {f"{s}|idle": {s: "1"} for s in idle_states}
    transitions["12|c"] = product_row(service_law(b0, b1), degrade_law)
    transitions["12|d"] = product_row(service_law(t0, t1), degrade_law)
    transitions["21|c"] = product_row(degrade_law, service_law(b0, b1))
    transitions["21|d"] = product_row(degrade_law, service_law(t0, t1))
    transitions["22|idle"] = product_row(degrade_law, degrade_law)

    return {
        "states": states,
        "failed": ["00"],
        "actions": actions,
        "transitions": transitions,
        "arithmetic": arithmetic,
    }


def write_bundled(outdir) -> list:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, spec in (("example31.json", example31_spec()),
                       ("maintenance.json", maintenance_spec())):
        path = outdir / name
        path.write_text(json.dumps(spec, indent=2) + "\n", encoding="utf-8")
        written.append(path)
    return written


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "."
    for p in write_bundled(target):
        print(p)
