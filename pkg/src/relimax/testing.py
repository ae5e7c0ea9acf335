"""Seeded random-model generation for property tests and benchmarks.

Models are small (3 to 6 states, 1 or 2 failed, 1 to 3 actions per state)
with Dirichlet rows sparsified by zeroing entries below 0.05 and
renormalizing, so every kept entry is at least 0.05: structural zeros are
exact, positive entries are bounded away from 0, and nontrivial splits
between surely-safe and at-risk states occur frequently.
"""

from __future__ import annotations

import numpy as np

from relimax.model import ModelSpec, StationaryPolicy, validate_model

_ACTION_POOL = ("a", "b", "c")


def random_model_raw(rng: np.random.Generator, sparsify: float = 0.05) -> dict:
    n = int(rng.integers(3, 7))
    n_failed = int(rng.integers(1, 3))
    states = [f"s{k}" for k in range(n)]
    failed_ids = sorted(int(i) for i in rng.choice(n, size=n_failed, replace=False))

    actions = {}
    transitions = {}
    for i, s in enumerate(states):
        k = int(rng.integers(1, 4))
        actions[s] = list(_ACTION_POOL[:k])
        for a in actions[s]:
            probs = rng.dirichlet(np.ones(n))
            probs[probs < sparsify] = 0.0
            probs /= probs.sum()
            transitions[f"{s}|{a}"] = {
                states[j]: float(probs[j]) for j in range(n) if probs[j] != 0.0
            }
    return {
        "states": states,
        "failed": [states[i] for i in failed_ids],
        "actions": actions,
        "transitions": transitions,
        "arithmetic": "float",
    }


def random_model(rng: np.random.Generator, sparsify: float = 0.05) -> ModelSpec:
    return validate_model(random_model_raw(rng, sparsify=sparsify))


def random_policy(rng: np.random.Generator, model: ModelSpec) -> StationaryPolicy:
    return StationaryPolicy(tuple(
        acts[int(rng.integers(0, len(acts)))] for acts in model.actions_of))
