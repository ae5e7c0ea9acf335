"""Exception hierarchy.

Every domain error carries a stable ``code`` (the class name) and a ``detail``
dict so the CLI can emit structured error objects.
"""

from __future__ import annotations


class RelimaxError(Exception):
    """Base class for all domain errors raised by this package."""

    def __init__(self, message: str, **detail):
        super().__init__(message)
        self.message = message
        self.detail = detail

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_json_dict(self) -> dict:
        return {
            "code": self.code,
            "message": self.message,
            "detail": {k: _plain(v) for k, v in self.detail.items()},
        }


def _plain(v):
    # best-effort conversion of detail payloads into JSON-encodable values
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    if isinstance(v, (list, tuple, set, frozenset)):
        return sorted(map(_plain, v)) if isinstance(v, (set, frozenset)) else [_plain(x) for x in v]
    return str(v)


# model construction and parsing

class ModelFormatError(RelimaxError):
    """Structurally malformed model or policy description."""


class EmptyFailureSet(RelimaxError):
    """The failed-state set is empty."""


class FailureSetIsAllStates(RelimaxError):
    """Every state is failed; there is nothing to optimize."""


class EmptyActionSet(RelimaxError):
    """Some state has no admissible action."""


class BadRowSum(RelimaxError):
    """A kernel row does not sum to one (within tolerance in float mode)."""


class NegativeProbability(RelimaxError):
    """A kernel entry is negative."""


class UnknownStateOrAction(RelimaxError):
    """A name in the file does not refer to a declared state or action."""


class InvalidPolicy(RelimaxError):
    """A policy is not total on the state set or picks inadmissible actions."""


# structural analysis

class ModelMismatch(RelimaxError):
    """Policy and analysis were built from different models."""


class TooManyPolicies(RelimaxError):
    """Requested enumeration exceeds the configured cap."""


# evaluation

class PolicyOutsideClass(RelimaxError):
    """Policy leaves the maximal absorbing set, so the reduced system does not apply."""


class EmptyGStar(RelimaxError):
    """The model is degenerate: no states with strictly intermediate failure risk."""


class SingularSystem(RelimaxError):
    """The reduced linear system is numerically singular."""


class OutOfRangeSolution(RelimaxError):
    """A solved probability falls outside [0, 1] beyond the clamping tolerance."""


class CoverageMismatch(RelimaxError):
    """Solved values do not cover exactly the intermediate-risk states."""


class NotConverged(RelimaxError):
    """An iterative scheme hit its iteration budget before meeting tolerance."""


# solver and oracle

class IterationBudgetExceeded(RelimaxError):
    """Policy iteration exceeded its bound; indicates a broken improvement step."""


class CertificateViolation(RelimaxError):
    """A computed solution failed its optimality-equation certificate."""


class NoUniformMinimizer(RelimaxError):
    """No single policy attains the componentwise minimum; contradicts theory."""
