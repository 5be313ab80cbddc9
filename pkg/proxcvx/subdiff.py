import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .catalog import Box, FunctionSpec, Point, sample_grid
from .certify import Z_POINTS
from .diagnostics import Triples, lattice_triples, quasiconvexity_probe
from .error import DimensionMismatchError, InfeasiblePointError
from .prox_core import ProxQuery, SolverConfig, _as_points, _evaluate_points, _in_box, prox
from .report import CheckReport, MembershipReport, ProbeReport, _jsonable
from .state import Membership, QcxKind, SubdiffKind

logger = logging.getLogger(__name__)

MEMBER_TOL = 1e-9
STRICT_EPS = 1e-9

#: default y-grid points per coordinate, by dimension
Y_POINTS = {1: 257, 2: 33}
DEFAULT_PROBES = (-100.0, -10.0, -1.0, 1.0, 10.0, 100.0)


def _default_ygrid(f: FunctionSpec, box: Box) -> np.ndarray:
    return sample_grid(f, box, Y_POINTS[f.dimension])


def _check_point(f: FunctionSpec, box: Box, x: Point) -> Tuple[np.ndarray, float]:
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    hx = f.evaluate(xv) if xv.shape == (f.dimension,) else np.inf
    if not box.contains(xv) or not np.isfinite(hx):
        raise InfeasiblePointError(f"Point {xv} is not in {box} ∩ dom {f.id}")
    return xv, float(hx)


def _sublevel_samples(kind: SubdiffKind, f: FunctionSpec, box: Box, hx: float, ygrid) -> Tuple[np.ndarray, np.ndarray]:
    ys = _as_points(ygrid, f.dimension)
    hy = _evaluate_points(f, ys)
    keep = _in_box(box, ys) & np.isfinite(hy)
    if kind is SubdiffKind.GUTIERREZ:
        keep &= hy <= hx
    elif kind is SubdiffKind.PLASTRIA:
        keep &= hy <= hx - STRICT_EPS * (1.0 + abs(hx))
    return ys[keep], hy[keep]


def in_subdiff(
        kind: SubdiffKind,
        f: FunctionSpec,
        box: Box,
        x: Point,
        xi: Point,
        ygrid=None
) -> MembershipReport:
    """Sampled membership test ``xi in ∂h(x)`` for the chosen subdifferential.

    The inequality ``h(y) >= h(x) + <xi, y - x>`` is checked at every sample
    y of the set (convex), of the sublevel set ``h(y) <= h(x)`` (gutierrez), or
    of the strict sublevel set ``h(y) <= h(x) - 1e-9 (1 + |h(x)|)`` (plastria).

    Parameters
    ----------
    kind : SubdiffKind
        Which subdifferential.
    f : FunctionSpec
        The function h.
    box : Box
        The set K.
    x : point
        Base point; must lie in ``set ∩ dom``.
    xi : vector
        Candidate subgradient.
    ygrid : array_like, optional
        Sample points y; defaults to a breakpoint-injected grid.

    Returns
    -------
    MembershipReport
        ``violator`` is the sample with the most negative slack.

    Raises
    ------
    InfeasiblePointError
        If `x` is outside ``set ∩ dom``.
    DimensionMismatchError
        If `xi` does not have the dimension of `f`.
    """
    kind = SubdiffKind(kind)
    xv, hx = _check_point(f, box, x)
    xiv = np.atleast_1d(np.asarray(xi, dtype=float))
    if xiv.shape != (f.dimension,):
        raise DimensionMismatchError(f"xi must have {f.dimension} component(s) for '{f.id}', got {xiv.size}")
    ys, hy = _sublevel_samples(kind, f, box, hx, _default_ygrid(f, box) if ygrid is None else ygrid)
    if ys.shape[0] == 0:
        return MembershipReport(kind, Membership.MEMBER, 0, np.inf)
    slack = hy - hx - (ys - xv) @ xiv
    k = int(np.argmin(slack))
    if slack[k] < -MEMBER_TOL:
        return MembershipReport(kind, Membership.NON_MEMBER, int(ys.shape[0]), float(slack[k]), ys[k].copy())
    return MembershipReport(kind, Membership.MEMBER, int(ys.shape[0]), float(slack[k]))


# ============================================================
# Minimality characterisation
# ============================================================
@dataclass(frozen=True)
class CharminReport:
    """The sampled minimality statements at a point.

    ``statements`` maps ``zero_in_plastria``, ``zero_in_gutierrez``,
    ``minimizes`` and ``probes_in_gutierrez`` (the four equivalent
    statements) plus ``probes_in_plastria``; ``agree`` tells whether the
    four equivalent statements have the same truth value.
    """

    x: Tuple[float, ...]
    statements: Dict[str, bool]
    agree: bool
    samples: int = 0

    def to_dict(self) -> dict:
        return _jsonable({"x": self.x, "statements": self.statements, "agree": self.agree, "samples": self.samples})


def charmin_check(
        f: FunctionSpec,
        box: Box,
        x: Point,
        ygrid=None,
        probes: Optional[Sequence[Point]] = None
) -> CharminReport:
    """Evaluate the sampled minimality statements at `x`.

    `probes` defaults to ``{±1, ±10, ±100}`` along every coordinate axis.
    """
    xv, hx = _check_point(f, box, x)
    ygrid = _default_ygrid(f, box) if ygrid is None else ygrid
    if probes is None:
        probes = []
        for i in range(f.dimension):
            for v in DEFAULT_PROBES:
                e = np.zeros(f.dimension)
                e[i] = v
                probes.append(e)
    zero = np.zeros(f.dimension)
    ys, hy = _sublevel_samples(SubdiffKind.CONVEX, f, box, hx, ygrid)
    statements = {
        "zero_in_plastria": in_subdiff(SubdiffKind.PLASTRIA, f, box, xv, zero, ygrid).is_member,
        "zero_in_gutierrez": in_subdiff(SubdiffKind.GUTIERREZ, f, box, xv, zero, ygrid).is_member,
        "minimizes": bool(ys.shape[0] == 0 or hx <= hy.min() + MEMBER_TOL),
        "probes_in_gutierrez": all(in_subdiff(SubdiffKind.GUTIERREZ, f, box, xv, p, ygrid).is_member for p in probes),
        "probes_in_plastria": all(in_subdiff(SubdiffKind.PLASTRIA, f, box, xv, p, ygrid).is_member for p in probes),
    }
    core = [statements[k] for k in ("zero_in_plastria", "zero_in_gutierrez", "minimizes", "probes_in_gutierrez")]
    agree = all(core) or not any(core)
    if not agree:
        logger.info("minimality statements of '%s' at %s disagree: %s", f.id, xv, statements)
    return CharminReport(tuple(xv.tolist()), statements, agree, int(ys.shape[0]))


# ============================================================
# Strong G-subdifferentiability
# ============================================================
@dataclass(frozen=True)
class StronglyGReport:
    """Membership part ``(z - xbar)/2 in ∂^≤ h(xbar)`` and strong-quasiconvexity part."""

    passed: bool
    membership_passed: bool
    strong: ProbeReport
    beta: float
    z_samples: int
    failure: Optional[dict] = None
    memberships: Tuple[MembershipReport, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return _jsonable({
            "passed": self.passed,
            "membership_passed": self.membership_passed,
            "strong": self.strong.to_dict(),
            "beta": self.beta,
            "z_samples": self.z_samples,
            "failure": self.failure,
        })


def strongly_G_check(
        f: FunctionSpec,
        box: Box,
        zgrid=None,
        cfg: Optional[SolverConfig] = None,
        beta: float = 1.0,
        ygrid=None,
        triples: Optional[Triples] = None
) -> StronglyGReport:
    """Check strong G-subdifferentiability of `f` on the set.

    For each z the prox point ``xbar`` is computed and ``(z - xbar)/2`` is
    tested for Gutierrez membership at ``xbar``; the strong quasiconvexity
    probe with modulus `beta` runs on `triples` (a lattice by default).

    Raises
    ------
    MultivaluedProxError
        If the prox is multivalued at some z.
    """
    cfg = cfg or SolverConfig()
    if zgrid is None:
        zgrid = sample_grid(f, box, Z_POINTS[f.dimension], cfg.grid.window_radius)
    ygrid = _default_ygrid(f, box) if ygrid is None else ygrid
    zs = _as_points(zgrid, f.dimension)
    zs = zs[_in_box(box, zs)]
    memberships = []
    failure = None
    for z in zs:
        xbar = prox(ProxQuery(f, box, z), cfg).point
        report = in_subdiff(SubdiffKind.GUTIERREZ, f, box, xbar, 0.5 * (z - xbar), ygrid)
        memberships.append(report)
        if failure is None and not report.is_member:
            failure = {"z": z, "xbar": xbar, "xi": 0.5 * (z - xbar), "y": report.violator, "slack": report.worst_slack}
    strong = quasiconvexity_probe(QcxKind.STRONG, f, box, triples if triples is not None else lattice_triples(f, box), beta)
    membership_passed = failure is None
    passed = membership_passed and strong.consistent
    logger.info("strongly-G check of '%s': membership=%s strong=%s", f.id, membership_passed, strong.verdict.value)
    return StronglyGReport(passed, membership_passed, strong, beta, int(zs.shape[0]), failure, tuple(memberships))


def strong_qcx_consequence(
        f: FunctionSpec,
        beta: float,
        alpha: float,
        x: Point,
        xi: Point,
        ygrid=None,
        box: Optional[Box] = None
) -> CheckReport:
    """Check ``<xi, y - x> <= -(beta / (2 alpha)) |y - x|^2`` on ``ygrid ∩ set ∩ S_{h(x)}(h)``.

    `box` defaults to the domain of `f`.
    """
    box = box or f.domain
    xv, hx = _check_point(f, box, x)
    xiv = np.atleast_1d(np.asarray(xi, dtype=float))
    ys, _ = _sublevel_samples(SubdiffKind.GUTIERREZ, f, box, hx, _default_ygrid(f, box) if ygrid is None else ygrid)
    if ys.shape[0] == 0:
        return CheckReport("strong_qcx_consequence", True, 0, np.inf)
    d = ys - xv
    slack = -(beta / (2.0 * alpha)) * np.sum(d * d, axis=1) - d @ xiv
    bad = np.flatnonzero(slack < -MEMBER_TOL)
    violator = (tuple(ys[int(bad[0])]),) if bad.size else None
    return CheckReport("strong_qcx_consequence", bad.size == 0, int(ys.shape[0]), float(slack.min()), violator,
                       {"beta": beta, "alpha": alpha})
