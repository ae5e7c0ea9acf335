"""Model and policy types, validation, and the on-disk JSON format.

A model describes a finite controlled Markov system: a state set, a nonempty
strict subset of *failed* states, a nonempty admissible action set per state,
and one transition row per (state, action) pair.

File format (one JSON object):

    states       list of unique state names
    failed       names of the failed states
    actions      object: state name -> nonempty list of action names
    transitions  object: "state|action" -> {target name: probability};
                 omitted targets are 0, one row per admissible pair
    arithmetic   "float" (default) or "exact"

Probabilities may be JSON numbers or strings, either rational ("3/10") or
decimal ("0.3"). In exact mode every literal is converted to a
``fractions.Fraction`` with no binary-float intermediate (files should be
parsed with ``parse_float=str``, as :func:`load_model` does), and all
downstream arithmetic stays rational. State and action names must not
contain ``"|"``, which separates the two halves of a transition key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from relimax.errors import (
    BadRowSum,
    EmptyActionSet,
    EmptyFailureSet,
    FailureSetIsAllStates,
    InvalidPolicy,
    ModelFormatError,
    NegativeProbability,
    UnknownStateOrAction,
)

PAIR_SEP = "|"

_MODEL_KEYS = {"states", "failed", "actions", "transitions", "arithmetic"}


def _parse_prob(value, exact: bool):
    """Parse one probability literal into float or Fraction.

    Accepts int, float, Fraction, and strings such as "1/2", "0.25", "3".
    Routing everything through Fraction keeps the float path correctly
    rounded and the exact path free of binary-float intermediates (floats
    passed in directly are taken at their exact binary value).
    """
    if isinstance(value, bool):
        raise ModelFormatError(f"probability must be numeric, got {value!r}")
    if isinstance(value, (int, Fraction)):
        v = Fraction(value)
    elif isinstance(value, float):
        v = Fraction(value)
    elif isinstance(value, str):
        try:
            v = Fraction(value)
        except (ValueError, ZeroDivisionError) as err:
            raise ModelFormatError(f"cannot parse probability {value!r}") from err
    else:
        raise ModelFormatError(f"probability must be numeric, got {type(value).__name__}")
    return v if exact else float(v)


def format_prob(v) -> str:
    """Round-trippable decimal (17 significant digits) or rational string."""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def mass_on(row, states: Iterable[int]):
    """Total probability a row places on a set of state ids."""
    total = 0
    for j in states:
        total = total + row[j]
    return total


@dataclass(frozen=True)
class PackedModel:
    """Float-mode array view of a model, restricted to non-failed states.

    Pairs are ordered by (state, action) over non-failed states only; rows of
    failed states are validated but never packed or read.
    """

    safe: np.ndarray        # (n_safe,) int64, ascending state ids
    safe_pos: np.ndarray    # (S,) int64, position within `safe`, -1 for failed
    pair_index: dict        # (state, action) -> row index into pair arrays
    pair_b: np.ndarray      # (P,) float64, one-step probability of failing
    pair_rows: np.ndarray   # (P, n_safe) float64, one-step law on safe states
    state_start: np.ndarray  # (n_safe + 1,) int64, pair range per safe state

    @property
    def n_safe(self) -> int:
        return int(self.safe.shape[0])


@dataclass(frozen=True)
class ModelSpec:
    """Validated, immutable controlled Markov system."""

    state_names: tuple[str, ...]
    action_names: tuple[str, ...]
    failed_states: frozenset[int]
    actions_of: tuple[tuple[int, ...], ...]   # ascending action ids per state
    rows: dict                                # (state, action) -> length-S tuple
    arithmetic: str = "float"
    row_sum_tol: float = 1e-9

    @property
    def n_states(self) -> int:
        return len(self.state_names)

    @property
    def is_exact(self) -> bool:
        return self.arithmetic == "exact"

    @property
    def safe_states(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n_states) if i not in self.failed_states)

    def state_id(self, name: str) -> int:
        try:
            return self._state_index[name]
        except KeyError:
            raise UnknownStateOrAction(f"unknown state {name!r}", name=name) from None

    def action_id(self, name: str) -> int:
        try:
            return self._action_index[name]
        except KeyError:
            raise UnknownStateOrAction(f"unknown action {name!r}", name=name) from None

    @property
    def _state_index(self) -> dict:
        cached = self.__dict__.get("_state_index_cache")
        if cached is None:
            cached = {s: i for i, s in enumerate(self.state_names)}
            object.__setattr__(self, "_state_index_cache", cached)
        return cached

    @property
    def _action_index(self) -> dict:
        cached = self.__dict__.get("_action_index_cache")
        if cached is None:
            cached = {a: i for i, a in enumerate(self.action_names)}
            object.__setattr__(self, "_action_index_cache", cached)
        return cached

    def row(self, i: int, a: int) -> tuple:
        return self.rows[(i, a)]

    def failure_mass(self, i: int, a: int):
        """One-step probability of entering the failed set from (i, a)."""
        return mass_on(self.rows[(i, a)], self.failed_states)

    def first_policy(self) -> "StationaryPolicy":
        """Lexicographically first policy: smallest action id in every state."""
        return StationaryPolicy(tuple(acts[0] for acts in self.actions_of))

    def check_policy(self, policy: "StationaryPolicy") -> None:
        if len(policy.choice) != self.n_states:
            raise InvalidPolicy(
                f"policy covers {len(policy.choice)} states, model has {self.n_states}")
        for i, a in enumerate(policy.choice):
            if a not in self.actions_of[i]:
                raise InvalidPolicy(
                    f"action id {a} not admissible in state {self.state_names[i]!r}",
                    state=self.state_names[i])

    def packed(self) -> PackedModel:
        """Float-mode array view, built once per model instance."""
        assert not self.is_exact, "packed arrays are a float-mode representation"
        cached = self.__dict__.get("_packed_cache")
        if cached is None:
            cached = _pack(self)
            object.__setattr__(self, "_packed_cache", cached)
        return cached

    def to_json_dict(self) -> dict:
        """Raw description that validates back to an equal ModelSpec."""
        transitions = {}
        for i in range(self.n_states):
            for a in self.actions_of[i]:
                key = f"{self.state_names[i]}{PAIR_SEP}{self.action_names[a]}"
                row = self.rows[(i, a)]
                entry = {}
                for j in range(self.n_states):
                    if row[j] != 0:
                        entry[self.state_names[j]] = (
                            row[j] if isinstance(row[j], float) else str(row[j]))
                transitions[key] = entry
        return {
            "states": list(self.state_names),
            "failed": [self.state_names[i] for i in sorted(self.failed_states)],
            "actions": {
                self.state_names[i]: [self.action_names[a] for a in self.actions_of[i]]
                for i in range(self.n_states)
            },
            "transitions": transitions,
            "arithmetic": self.arithmetic,
        }


@dataclass(frozen=True)
class StationaryPolicy:
    """One admissible action id per state, total on the state set."""

    choice: tuple[int, ...]

    def action(self, i: int) -> int:
        return self.choice[i]

    def to_name_dict(self, model: ModelSpec) -> dict:
        return {model.state_names[i]: model.action_names[a]
                for i, a in enumerate(self.choice)}


def _pack(model: ModelSpec) -> PackedModel:
    n = model.n_states
    safe = np.array(model.safe_states, dtype=np.int64)
    safe_pos = np.full(n, -1, dtype=np.int64)
    safe_pos[safe] = np.arange(safe.shape[0])

    pair_index: dict = {}
    b_list: list[float] = []
    row_list: list[np.ndarray] = []
    starts = [0]
    failed = sorted(model.failed_states)
    for i in model.safe_states:
        for a in model.actions_of[i]:
            row = model.rows[(i, a)]
            pair_index[(i, a)] = len(b_list)
            b_list.append(float(sum(row[j] for j in failed)))
            row_list.append(np.array([row[j] for j in model.safe_states], dtype=np.float64))
        starts.append(len(b_list))

    pair_rows = (np.vstack(row_list) if row_list
                 else np.zeros((0, safe.shape[0]), dtype=np.float64))
    return PackedModel(
        safe=safe,
        safe_pos=safe_pos,
        pair_index=pair_index,
        pair_b=np.array(b_list, dtype=np.float64),
        pair_rows=np.ascontiguousarray(pair_rows),
        state_start=np.array(starts, dtype=np.int64),
    )


def validate_model(raw: Mapping, row_sum_tol: float = 1e-9) -> ModelSpec:
    """Validate a raw model description and build a ModelSpec.

    Raises ModelFormatError, EmptyFailureSet, FailureSetIsAllStates,
    EmptyActionSet, BadRowSum, NegativeProbability, or UnknownStateOrAction.
    """
    if not isinstance(raw, Mapping):
        raise ModelFormatError("model description must be a JSON object")
    extra = set(raw) - _MODEL_KEYS
    if extra:
        raise ModelFormatError(f"unknown top-level keys: {sorted(extra)}")

    states = raw.get("states")
    if not isinstance(states, list) or not states:
        raise ModelFormatError("'states' must be a nonempty list of names")
    seen = set()
    for s in states:
        if not isinstance(s, str) or not s:
            raise ModelFormatError(f"state name must be a nonempty string, got {s!r}")
        if PAIR_SEP in s:
            raise ModelFormatError(f"state name {s!r} contains {PAIR_SEP!r}")
        if s in seen:
            raise ModelFormatError(f"duplicate state name {s!r}")
        seen.add(s)
    state_names = tuple(states)
    index = {s: i for i, s in enumerate(state_names)}

    arithmetic = raw.get("arithmetic", "float")
    if arithmetic not in ("float", "exact"):
        raise ModelFormatError(f"arithmetic must be 'float' or 'exact', got {arithmetic!r}")
    exact = arithmetic == "exact"

    failed_raw = raw.get("failed")
    if not isinstance(failed_raw, list):
        raise ModelFormatError("'failed' must be a list of state names")
    failed = set()
    for s in failed_raw:
        if s not in index:
            raise UnknownStateOrAction(f"failed state {s!r} is not declared", name=s)
        failed.add(index[s])
    if not failed:
        raise EmptyFailureSet("the failed-state set is empty")
    if len(failed) == len(state_names):
        raise FailureSetIsAllStates("every state is failed")

    actions_raw = raw.get("actions")
    if not isinstance(actions_raw, Mapping):
        raise ModelFormatError("'actions' must map state names to action-name lists")
    for s in actions_raw:
        if s not in index:
            raise UnknownStateOrAction(f"actions given for unknown state {s!r}", name=s)

    action_names: list[str] = []
    action_index: dict = {}
    actions_of: list[tuple[int, ...]] = []
    for s in state_names:
        names = actions_raw.get(s)
        if not isinstance(names, list) or not names:
            raise EmptyActionSet(f"state {s!r} has no admissible actions", state=s)
        ids = []
        for a in names:
            if not isinstance(a, str) or not a:
                raise ModelFormatError(f"action name must be a nonempty string, got {a!r}")
            if PAIR_SEP in a:
                raise ModelFormatError(f"action name {a!r} contains {PAIR_SEP!r}")
            if a not in action_index:
                action_index[a] = len(action_names)
                action_names.append(a)
            ids.append(action_index[a])
        if len(set(ids)) != len(ids):
            raise ModelFormatError(f"duplicate action for state {s!r}")
        actions_of.append(tuple(sorted(ids)))

    transitions_raw = raw.get("transitions")
    if not isinstance(transitions_raw, Mapping):
        raise ModelFormatError("'transitions' must map 'state|action' keys to rows")

    rows: dict = {}
    for key, row_raw in transitions_raw.items():
        parts = key.split(PAIR_SEP)
        if len(parts) != 2:
            raise ModelFormatError(f"transition key {key!r} is not 'state{PAIR_SEP}action'")
        s, a = parts
        if s not in index:
            raise UnknownStateOrAction(f"transition row for unknown state {s!r}", name=s)
        if a not in action_index:
            raise UnknownStateOrAction(f"transition row for unknown action {a!r}", name=a)
        i, aid = index[s], action_index[a]
        if aid not in actions_of[i]:
            raise UnknownStateOrAction(
                f"action {a!r} is not admissible in state {s!r}", state=s, action=a)
        if not isinstance(row_raw, Mapping):
            raise ModelFormatError(f"row {key!r} must be an object of probabilities")
        zero = Fraction(0) if exact else 0.0
        row = [zero] * len(state_names)
        for target, value in row_raw.items():
            if target not in index:
                raise UnknownStateOrAction(
                    f"row {key!r} references unknown state {target!r}", name=target)
            p = _parse_prob(value, exact)
            if p < 0:
                raise NegativeProbability(
                    f"p({target}|{s},{a}) = {p} is negative", state=s, action=a, target=target)
            row[index[target]] = p
        total = sum(row)
        if exact:
            if total != 1:
                raise BadRowSum(f"row {key!r} sums to {total}, expected exactly 1",
                                state=s, action=a, total=str(total))
        elif abs(total - 1.0) > row_sum_tol:
            raise BadRowSum(f"row {key!r} sums to {total!r}, outside tolerance {row_sum_tol}",
                            state=s, action=a, total=total)
        rows[(i, aid)] = tuple(row)

    for i, s in enumerate(state_names):
        for aid in actions_of[i]:
            if (i, aid) not in rows:
                raise BadRowSum(
                    f"row for state {s!r}, action {action_names[aid]!r} "
                    f"is missing (sums to 0)", state=s, action=action_names[aid], total=0)

    return ModelSpec(
        state_names=state_names,
        action_names=tuple(action_names),
        failed_states=frozenset(failed),
        actions_of=tuple(actions_of),
        rows=rows,
        arithmetic=arithmetic,
        row_sum_tol=row_sum_tol,
    )


def load_model(path, force_exact: bool = False, row_sum_tol: float = 1e-9) -> ModelSpec:
    """Load and validate a model file.

    parse_float=str defers number conversion to the arithmetic mode, so exact
    models never see a binary float.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh, parse_float=str)
    if force_exact:
        raw = dict(raw)
        raw["arithmetic"] = "exact"
    return validate_model(raw, row_sum_tol=row_sum_tol)


def policy_space_size(model: ModelSpec) -> int:
    """Number of stationary deterministic policies (exact integer)."""
    size = 1
    for acts in model.actions_of:
        size *= len(acts)
    return size


def policy_from_names(model: ModelSpec, mapping: Mapping) -> StationaryPolicy:
    """Build a policy from {state name: action name}; must cover every state."""
    if not isinstance(mapping, Mapping):
        raise ModelFormatError("policy must be a JSON object {state: action}")
    for s in mapping:
        if s not in model._state_index:
            raise UnknownStateOrAction(f"policy names unknown state {s!r}", name=s)
    choice = []
    for i, s in enumerate(model.state_names):
        if s not in mapping:
            raise InvalidPolicy(f"policy gives no action for state {s!r}", state=s)
        a = mapping[s]
        aid = model._action_index.get(a)
        if aid is None:
            raise UnknownStateOrAction(f"policy names unknown action {a!r}", name=a)
        if aid not in model.actions_of[i]:
            raise InvalidPolicy(f"action {a!r} is not admissible in state {s!r}",
                                state=s, action=a)
        choice.append(aid)
    return StationaryPolicy(tuple(choice))


def load_policy(path, model: ModelSpec) -> StationaryPolicy:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return policy_from_names(model, raw)
