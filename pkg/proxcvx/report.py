from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .state import Membership, ProbeVerdict, SubdiffKind


def _jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays, tuples and enums into JSON-friendly values."""
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if np.isinf(value):
            return "+inf" if value > 0 else "-inf"
        if np.isnan(value):
            return "nan"
        return value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if hasattr(value, "value") and hasattr(value, "name"):
        return value.value
    return value


@dataclass(frozen=True)
class CheckReport:
    """Verdict of a sampled inequality check.

    Attributes
    ----------
    name : str
        Short name of the checked property (``"pr2"``, ``"fnem"``, ...).
    passed : bool
        True when every sample satisfied the inequality within tolerance.
    samples : int
        Number of samples the inequality was evaluated on.
    worst_slack : float
        Smallest ``rhs - lhs`` seen; negative beyond the tolerance means a
        violation.
    violator : tuple or None
        The first sample that violated the inequality, if any.
    details : dict
        Check-specific extras (sequences, secondary slacks, ...).
    """

    name: str
    passed: bool
    samples: int
    worst_slack: float
    violator: Optional[tuple] = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _jsonable({
            "name": self.name,
            "passed": self.passed,
            "samples": self.samples,
            "worst_slack": self.worst_slack,
            "violator": self.violator,
            "details": self.details,
        })


@dataclass(frozen=True)
class MembershipReport:
    """Outcome of a sampled subdifferential membership test."""

    kind: SubdiffKind
    verdict: Membership
    samples_checked: int
    worst_slack: float
    violator: Optional[np.ndarray] = None

    @property
    def is_member(self) -> bool:
        return self.verdict is Membership.MEMBER

    def to_dict(self) -> dict:
        return _jsonable({
            "kind": self.kind,
            "verdict": self.verdict,
            "worst_slack": self.worst_slack,
            "violator": self.violator,
            "samples": self.samples_checked,
        })


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of a definitional probe (quasiconvexity, identities, ...).

    ``violator`` records the offending sample together with both evaluated
    sides of the inequality.
    """

    property: str
    verdict: ProbeVerdict
    samples: int
    violator: Optional[dict] = None

    @property
    def consistent(self) -> bool:
        return self.verdict is ProbeVerdict.CONSISTENT

    def to_dict(self) -> dict:
        return _jsonable({
            "property": self.property,
            "verdict": self.verdict,
            "samples": self.samples,
            "violator": self.violator,
        })
