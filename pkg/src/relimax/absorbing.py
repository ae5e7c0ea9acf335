"""Layer construction and the largest absorbing set of non-failed states.

Peeling layers: U_1 collects the non-failed states from which every action
risks immediate failure; U_n collects those from which every action risks
falling into an earlier layer (or the failed set). What survives the peeling
is the largest set F* of non-failed states that some policy can make
absorbing, i.e. from which failure can be avoided with certainty. Its
complement within the non-failed states, G*, carries strictly intermediate
failure risk. Positivity tests use the structural convention: an entry is
"positive" exactly when the stored value is > 0, and a set has zero mass
exactly when every stored entry in it equals 0 (float entries included).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

from relimax.errors import InvalidPolicy, ModelMismatch, TooManyPolicies
from relimax.model import ModelSpec, StationaryPolicy


def _hits(row, states) -> bool:
    """True when the row puts positive mass on the given state set."""
    return any(row[j] > 0 for j in states)


@dataclass(frozen=True)
class PolicyAbsorption:
    """Per-policy layer decomposition and absorbing set F(g)."""

    layers: tuple[frozenset, ...]
    n_g: int
    f_of_g: frozenset


@dataclass(frozen=True)
class AbsorbingAnalysis:
    """Result of the layer construction on a model.

    restricted_actions(i) is the full admissible set on failed states and on
    g_star, and on f_star only the actions that put zero mass on every layer;
    policies drawn from it per state are exactly those whose absorbing set
    equals f_star.
    """

    model: ModelSpec = field(compare=False, repr=False)
    layers: tuple[frozenset, ...]
    n_star: int
    f_star: frozenset
    g_star: frozenset
    restricted_actions: tuple[tuple[int, ...], ...]

    def first_restricted_policy(self) -> StationaryPolicy:
        """Lexicographically first member of the restricted policy class."""
        return StationaryPolicy(tuple(acts[0] for acts in self.restricted_actions))

    def restricted_class_size(self) -> int:
        size = 1
        for acts in self.restricted_actions:
            size *= len(acts)
        return size

    def to_json_dict(self) -> dict:
        names = self.model.state_names
        anames = self.model.action_names
        return {
            "layers": [[names[i] for i in sorted(layer)] for layer in self.layers],
            "n_star": self.n_star,
            "f_star": [names[i] for i in sorted(self.f_star)],
            "g_star": [names[i] for i in sorted(self.g_star)],
            "restricted_actions": {
                names[i]: [anames[a] for a in self.restricted_actions[i]]
                for i in range(self.model.n_states)
            },
        }


def compute_largest_absorbing(model: ModelSpec) -> AbsorbingAnalysis:
    """Run the layer construction to its first empty layer or exhausted state set.

    Terminates after at most |S| rounds. The trailing empty layer, when the
    construction stops that way, is kept in `layers`, so n_star == len(layers)
    in both stopping cases.
    """
    layers: list[frozenset] = []
    absorbed = set(model.failed_states)   # failed set plus all layers so far
    remaining = set(model.safe_states)

    while True:
        layer = frozenset(
            i for i in remaining
            if all(_hits(model.rows[(i, a)], absorbed) for a in model.actions_of[i])
        )
        layers.append(layer)
        absorbed |= layer
        remaining -= layer
        if not layer or not remaining:
            break

    f_star = frozenset(remaining)
    g_star = frozenset(set(model.safe_states) - f_star)

    restricted: list[tuple[int, ...]] = []
    for i in range(model.n_states):
        if i in f_star:
            acts = tuple(a for a in model.actions_of[i]
                         if not _hits(model.rows[(i, a)], absorbed))
            assert acts, "an f_star state must retain at least one safe action"
        else:
            acts = model.actions_of[i]
        restricted.append(acts)

    return AbsorbingAnalysis(
        model=model,
        layers=tuple(layers),
        n_star=len(layers),
        f_star=f_star,
        g_star=g_star,
        restricted_actions=tuple(restricted),
    )


def absorbing_set_of_policy(model: ModelSpec, policy: StationaryPolicy) -> PolicyAbsorption:
    """Layer decomposition under one fixed policy; works for any policy.

    F(g) is the set of non-failed states from which the policy never reaches
    the failed set; equivalently the states where its failure probability
    is 0.
    """
    model.check_policy(policy)
    layers: list[frozenset] = []
    absorbed = set(model.failed_states)
    remaining = set(model.safe_states)

    while True:
        layer = frozenset(
            i for i in remaining
            if _hits(model.rows[(i, policy.choice[i])], absorbed)
        )
        layers.append(layer)
        absorbed |= layer
        remaining -= layer
        if not layer or not remaining:
            break

    return PolicyAbsorption(layers=tuple(layers), n_g=len(layers),
                            f_of_g=frozenset(remaining))


def membership_test(analysis: AbsorbingAnalysis, policy: StationaryPolicy) -> bool:
    """True when the policy keeps f_star absorbing (choice within the
    restricted sets everywhere)."""
    try:
        analysis.model.check_policy(policy)
    except InvalidPolicy as err:
        raise ModelMismatch(
            "policy and analysis do not describe the same model") from err
    return all(policy.choice[i] in analysis.restricted_actions[i]
               for i in range(analysis.model.n_states))


def enumerate_restricted_policies(analysis: AbsorbingAnalysis,
                                  cap: int = 1_000_000) -> Iterator[StationaryPolicy]:
    """Yield the restricted policy class in lexicographic order of action ids.

    Raises TooManyPolicies before yielding anything when the class size
    exceeds the cap.
    """
    size = analysis.restricted_class_size()
    if size > cap:
        raise TooManyPolicies(
            f"restricted class holds {size} policies, cap is {cap}",
            size=size, cap=cap)
    return (StationaryPolicy(choice)
            for choice in itertools.product(*analysis.restricted_actions))
