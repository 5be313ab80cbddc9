import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .catalog import INF, Box, FunctionSpec, Point, sample_grid, window
from .error import DivergentProxError, InfeasiblePointError, ProxCvxError
from .pool import _WorkerPool
from .prox_core import ProxQuery, ProxResult, SolverConfig, _as_points, _evaluate_points, _in_box, prox
from .report import CheckReport, _jsonable
from .state import Attainment, BoundType, CertificateStatus, Multiplicity

logger = logging.getLogger(__name__)

#: default z-grid / x-grid points per coordinate, by dimension
Z_POINTS = {1: 33, 2: 9}
X_POINTS = {1: 257, 2: 33}

ALPHA_TOL = 1e-9
FNE_TOL = 1e-9
SCALING_TOL = 1e-6


# ============================================================
# Records
# ============================================================
@dataclass(frozen=True)
class Witness:
    """A sample pair of the prox-convexity inequality ``alpha * ip >= lhs``.

    ``lhs = h(xbar) - h(x)`` and ``ip = <xbar - z, x - xbar>``.
    """

    z: Tuple[float, ...]
    xbar: Tuple[float, ...]
    x: Tuple[float, ...]
    lhs: float
    ip: float

    @classmethod
    def from_points(cls, f: FunctionSpec, z: Point, xbar: Point, x: Point) -> "Witness":
        zv, xb, xv = (np.atleast_1d(np.asarray(p, dtype=float)) for p in (z, xbar, x))
        lhs = f.evaluate(xb) - f.evaluate(xv)
        ip = float(np.dot(xb - zv, xv - xb))
        return cls(tuple(zv.tolist()), tuple(xb.tolist()), tuple(xv.tolist()), float(lhs), ip)

    def to_dict(self) -> dict:
        return _jsonable({"z": self.z, "xbar": self.xbar, "x": self.x, "lhs": self.lhs, "ip": self.ip})


@dataclass(frozen=True)
class AlphaInterval:
    """An interval of alpha values with explicit end closure."""

    lower: float = 0.0
    upper: float = INF
    lower_closed: bool = False
    upper_closed: bool = False

    @property
    def is_empty(self) -> bool:
        if self.lower < self.upper:
            return False
        return not (self.lower == self.upper and self.lower_closed and self.upper_closed)

    def contains(self, alpha: float) -> bool:
        above = alpha > self.lower or (self.lower_closed and alpha == self.lower)
        below = alpha < self.upper or (self.upper_closed and alpha == self.upper)
        return above and below

    def to_dict(self) -> dict:
        return _jsonable({
            "lower": self.lower,
            "upper": self.upper,
            "lower_closed": self.lower_closed,
            "upper_closed": self.upper_closed,
        })

    def __str__(self) -> str:
        left = "[" if self.lower_closed else "("
        right = "]" if self.upper_closed else ")"
        return f"{left}{self.lower:g}, {self.upper:g}{right}"


@dataclass(frozen=True)
class AlphaCertificate:
    """Result of `alpha_interval`.

    Attributes
    ----------
    status : CertificateStatus
        certified, refuted or indeterminate.
    interval : AlphaInterval or None
        The feasible alpha values; None unless certified.
    witness : Witness or None
        Refuting pair (or the pair of the two minimisers of a multivalued prox).
    z_samples, x_samples : int
        Grid sizes the certificate was computed on.
    lower_binding, upper_binding : Witness or None
        Pairs attaining the interval endpoints.
    diagnostic : str
        Human-readable reason for refuted/indeterminate outcomes.
    rows : tuple of dict
        Per-pair constraint rows, only when requested.
    """

    status: CertificateStatus
    interval: Optional[AlphaInterval]
    witness: Optional[Witness]
    z_samples: int
    x_samples: int
    lower_binding: Optional[Witness] = None
    upper_binding: Optional[Witness] = None
    diagnostic: str = ""
    rows: Tuple[dict, ...] = field(default=(), repr=False)

    @property
    def certified(self) -> bool:
        return self.status is CertificateStatus.CERTIFIED

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "alpha_interval": self.interval.to_dict() if self.interval else None,
            "witness": self.witness.to_dict() if self.witness else None,
            "z_samples": self.z_samples,
            "x_samples": self.x_samples,
            "binding_pair": {
                "lower": self.lower_binding.to_dict() if self.lower_binding else None,
                "upper": self.upper_binding.to_dict() if self.upper_binding else None,
            },
            "diagnostic": self.diagnostic,
        }


@dataclass(frozen=True)
class AlphaCheck:
    """Verdict of `check_alpha`: pass/fail plus the first violating pair."""

    alpha: float
    passed: bool
    samples: int
    worst_slack: float
    witness: Optional[Witness] = None

    def to_dict(self) -> dict:
        return _jsonable({
            "alpha": self.alpha,
            "passed": self.passed,
            "samples": self.samples,
            "worst_slack": self.worst_slack,
            "witness": self.witness.to_dict() if self.witness else None,
        })


# ============================================================
# Grids
# ============================================================
def default_grids(f: FunctionSpec, box: Box, cfg: Optional[SolverConfig] = None,
                  z_points: Optional[int] = None, x_points: Optional[int] = None):
    """Breakpoint-injected z- and x-grids over ``set ∩ dom``."""
    cfg = cfg or SolverConfig()
    radius = cfg.grid.window_radius
    zgrid = sample_grid(f, box, z_points or Z_POINTS[f.dimension], radius)
    xgrid = sample_grid(f, box, x_points or X_POINTS[f.dimension], radius)
    return zgrid, xgrid


def _prepare(f: FunctionSpec, box: Box, zgrid, xgrid, cfg: SolverConfig):
    if zgrid is None or xgrid is None:
        dz, dx = default_grids(f, box, cfg)
        zgrid = dz if zgrid is None else zgrid
        xgrid = dx if xgrid is None else xgrid
    zs = _as_points(zgrid, f.dimension)
    zs = zs[_in_box(box, zs)]
    xs = _as_points(xgrid, f.dimension)
    hx = _evaluate_points(f, xs)
    keep = _in_box(box, xs) & np.isfinite(hx)
    if zs.shape[0] == 0 or not np.any(keep):
        raise ProxCvxError("Sample grids do not meet set ∩ dom")
    return zs, xs[keep], hx[keep]


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return num / den


# ============================================================
# alpha_interval
# ============================================================
@dataclass
class _ZOutcome:
    status: Optional[CertificateStatus] = None
    witness: Optional[Witness] = None
    lower: float = 0.0
    lower_w: Optional[Witness] = None
    upper: float = INF
    upper_w: Optional[Witness] = None
    diagnostic: str = ""
    rows: List[dict] = field(default_factory=list)


def _classify(f, box, z, xs, hx, cfg, record_rows) -> _ZOutcome:
    result = prox(ProxQuery(f, box, z), cfg)
    if result.attained is Attainment.DIVERGENT:
        return _ZOutcome(CertificateStatus.INDETERMINATE, diagnostic=f"prox diverges at z={tuple(z)}")
    if result.attained is Attainment.UNVERIFIED:
        return _ZOutcome(
            CertificateStatus.INDETERMINATE,
            diagnostic=f"prox attainment unverified at z={tuple(z)} (near {list(result.argmin)})",
        )
    if result.multiplicity is Multiplicity.MULTIPLE:
        witness = Witness.from_points(f, z, result.argmin[0], result.argmin[1])
        return _ZOutcome(
            CertificateStatus.REFUTED, witness,
            diagnostic=f"prox is multivalued at z={tuple(z)}: {list(result.argmin)}",
        )

    xbar = result.point
    d = xbar - z
    e = xs - xbar
    lhs = f.evaluate(xbar) - hx
    ip = e @ d
    eps = 1e-12 * (1.0 + np.linalg.norm(d) * np.linalg.norm(e, axis=1))
    tol = ALPHA_TOL * (1.0 + np.abs(lhs))
    positive = ip > eps
    negative = ip < -eps
    binding = lhs > tol

    kinds = np.full(ip.shape, BoundType.VACUOUS, dtype=object)
    kinds[positive & binding] = BoundType.LOWER
    kinds[~positive & binding] = BoundType.INFEASIBLE
    kinds[negative & ~binding] = BoundType.UPPER
    bounds = _ratio(lhs, ip)

    out = _ZOutcome()
    if record_rows:
        for k in range(ip.size):
            kind = kinds[k]
            out.rows.append({
                "z": tuple(z), "xbar": tuple(xbar), "x": tuple(xs[k]),
                "lhs": float(lhs[k]), "ip": float(ip[k]), "bound_type": kind.value,
                "bound_value": float(bounds[k]) if kind in (BoundType.LOWER, BoundType.UPPER) else None,
            })

    infeasible = np.flatnonzero(kinds == BoundType.INFEASIBLE)
    if infeasible.size:
        k = int(infeasible[0])
        out.status = CertificateStatus.REFUTED
        out.witness = Witness.from_points(f, z, xbar, xs[k])
        out.diagnostic = f"no alpha > 0 satisfies the pair z={tuple(z)}, x={tuple(xs[k])}"
        return out
    lower_idx = np.flatnonzero(kinds == BoundType.LOWER)
    if lower_idx.size:
        k = int(lower_idx[np.argmax(bounds[lower_idx])])
        out.lower, out.lower_w = float(bounds[k]), Witness.from_points(f, z, xbar, xs[k])
    upper_idx = np.flatnonzero(kinds == BoundType.UPPER)
    if upper_idx.size:
        k = int(upper_idx[np.argmin(bounds[upper_idx])])
        out.upper, out.upper_w = float(bounds[k]), Witness.from_points(f, z, xbar, xs[k])
    return out


def alpha_interval(
        f: FunctionSpec,
        box: Box,
        zgrid=None,
        xgrid=None,
        cfg: Optional[SolverConfig] = None,
        record_rows: bool = False
) -> AlphaCertificate:
    """Feasible interval of prox-convex values on the sample grids.

    For each z the prox point ``xbar`` is computed and every sample x yields
    the constraint ``alpha * <xbar - z, x - xbar> >= h(xbar) - h(x)``, which
    is a lower bound, an upper bound, vacuous, or infeasible for every
    ``alpha > 0``. The bounds are intersected with ``(0, +inf)``.

    Parameters
    ----------
    f : FunctionSpec
        Function to certify.
    box : Box
        Feasible set.
    zgrid, xgrid : array_like, optional
        Sample points; default to breakpoint-injected grids of 33 and 257
        points per coordinate (9 and 33 in two dimensions).
    cfg : SolverConfig, optional
        Prox solver settings.
    record_rows : bool, optional
        Keep every classified constraint for the witness CSV.

    Returns
    -------
    AlphaCertificate
        ``refuted`` when a pair admits no alpha or a prox is multivalued,
        ``indeterminate`` when a prox diverges or its attainment cannot be
        verified, ``certified`` otherwise.
    """
    cfg = cfg or SolverConfig()
    zs, xs, hx = _prepare(f, box, zgrid, xgrid, cfg)
    pool = _WorkerPool(cfg.threads)
    outcomes = pool._map(lambda z: _classify(f, box, z, xs, hx, cfg, record_rows), list(zs))
    rows = tuple(row for o in outcomes for row in o.rows)

    def make(status, interval=None, witness=None, lower_w=None, upper_w=None, diagnostic=""):
        cert = AlphaCertificate(status, interval, witness, zs.shape[0], xs.shape[0],
                                lower_w, upper_w, diagnostic, rows)
        logger.info("certify '%s' on %s: %s %s", f.id, box, status.value, interval or diagnostic)
        return cert

    for o in outcomes:
        if o.status is CertificateStatus.REFUTED:
            return make(CertificateStatus.REFUTED, witness=o.witness, diagnostic=o.diagnostic)
    for o in outcomes:
        if o.status is CertificateStatus.INDETERMINATE:
            return make(CertificateStatus.INDETERMINATE, diagnostic=o.diagnostic)

    lower, lower_w, upper, upper_w = 0.0, None, INF, None
    for o in outcomes:
        if o.lower > lower:
            lower, lower_w = o.lower, o.lower_w
        if o.upper < upper:
            upper, upper_w = o.upper, o.upper_w

    if upper <= 0:
        return make(CertificateStatus.REFUTED, witness=upper_w,
                    diagnostic=f"upper bound {upper:g} leaves no positive alpha")
    if lower > upper:
        return make(CertificateStatus.REFUTED, witness=upper_w,
                    diagnostic=f"lower bound {lower:g} exceeds upper bound {upper:g}")
    interval = AlphaInterval(lower, upper, lower_w is not None, upper_w is not None)
    if lower == upper:
        return make(CertificateStatus.INDETERMINATE, interval=None, lower_w=lower_w, upper_w=upper_w,
                    diagnostic=f"interval degenerates to the single value {lower:g}")
    return make(CertificateStatus.CERTIFIED, interval, lower_w=lower_w, upper_w=upper_w)


# ============================================================
# Direct checks
# ============================================================
def check_alpha(
        f: FunctionSpec,
        box: Box,
        alpha: float,
        zgrid=None,
        xgrid=None,
        cfg: Optional[SolverConfig] = None
) -> AlphaCheck:
    """Verify ``h(xbar) - h(x) <= alpha * <xbar - z, x - xbar>`` on the grids.

    Every minimiser of a multivalued prox is checked. The additive tolerance
    is ``1e-9 * (1 + |lhs|)``.

    Raises
    ------
    DivergentProxError
        If the prox diverges at some z.
    """
    if not alpha > 0:
        raise ProxCvxError("alpha must be positive")
    cfg = cfg or SolverConfig()
    zs, xs, hx = _prepare(f, box, zgrid, xgrid, cfg)
    results: List[ProxResult] = _WorkerPool(cfg.threads)._map(lambda z: prox(ProxQuery(f, box, z), cfg), list(zs))

    worst, samples, witness = INF, 0, None
    for z, result in zip(zs, results):
        if result.attained is Attainment.DIVERGENT:
            raise DivergentProxError(f"prox of '{f.id}' diverges at z={tuple(z)}")
        for point in result.argmin:
            xbar = np.asarray(point)
            lhs = f.evaluate(xbar) - hx
            ip = (xs - xbar) @ (xbar - z)
            slack = alpha * ip - lhs
            samples += slack.size
            worst = min(worst, float(slack.min()))
            bad = np.flatnonzero(-slack > ALPHA_TOL * (1.0 + np.abs(lhs)))
            if bad.size and witness is None:
                witness = Witness.from_points(f, z, xbar, xs[int(bad[0])])
    return AlphaCheck(float(alpha), witness is None, samples, worst, witness)


def _prox_map(f: FunctionSpec, box: Box, cfg: SolverConfig):
    cache: Dict[Tuple[float, ...], np.ndarray] = {}

    def T(z: np.ndarray) -> np.ndarray:
        key = tuple(np.asarray(z, dtype=float).tolist())
        if key not in cache:
            cache[key] = prox(ProxQuery(f, box, key), cfg).point
        return cache[key]

    return T


def check_firm_nonexpansive(
        f: FunctionSpec,
        box: Box,
        pairs: Sequence[Tuple[Point, Point]],
        cfg: Optional[SolverConfig] = None
) -> CheckReport:
    """Firm nonexpansiveness of ``T = prox(f, set, .)`` on sample pairs.

    Checks ``|Tx - Ty|^2 <= <x - y, Tx - Ty>`` and the equivalent form
    ``|Tx - Ty|^2 + |(x - Tx) - (y - Ty)|^2 <= |x - y|^2``.

    Raises
    ------
    MultivaluedProxError, DivergentProxError
        If the prox is not single-valued or unbounded at a sampled point.
    InfeasiblePointError
        If a pair leaves the set.
    """
    cfg = cfg or SolverConfig()
    T = _prox_map(f, box, cfg)
    worst_m, worst_f, violator = INF, INF, None
    for x, y in pairs:
        xv = np.atleast_1d(np.asarray(x, dtype=float))
        yv = np.atleast_1d(np.asarray(y, dtype=float))
        if not (box.contains(xv) and box.contains(yv)):
            raise InfeasiblePointError(f"Pair ({xv}, {yv}) does not lie in {box}")
        tx, ty = T(xv), T(yv)
        dt = tx - ty
        dx = xv - yv
        sq = float(dt @ dt)
        slack_m = float(dx @ dt) - sq
        rest = dx - dt
        slack_f = float(dx @ dx) - sq - float(rest @ rest)
        tol = FNE_TOL * (1.0 + float(dx @ dx))
        worst_m, worst_f = min(worst_m, slack_m), min(worst_f, slack_f)
        if violator is None and (slack_m < -tol or slack_f < -tol):
            violator = (tuple(xv), tuple(yv))
    return CheckReport(
        "firm_nonexpansive", violator is None, len(pairs), worst_m, violator,
        {"fne_worst_slack": worst_f},
    )


def sample_pairs(
        f: FunctionSpec,
        box: Box,
        count: int = 1000,
        pool_size: int = 64,
        seed: int = 0,
        window_radius: float = 16.0
) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Random pairs drawn from a fixed pool of random points of ``set ∩ dom``.

    Drawing from a pool keeps the number of distinct prox solves at
    `pool_size` however many pairs are requested.
    """
    feasible = f.feasible(box)
    rng = np.random.default_rng(seed)
    bounds = [window(lo, hi, window_radius) for lo, hi in zip(feasible.lower, feasible.upper)]
    lows = np.array([b[0] for b in bounds])
    highs = np.array([b[1] for b in bounds])
    points = rng.uniform(lows, highs, size=(pool_size, f.dimension))
    i = rng.integers(0, pool_size, size=count)
    j = rng.integers(0, pool_size, size=count)
    return [(points[a], points[b]) for a, b in zip(i, j)]


def scaling_consistency(
        f: FunctionSpec,
        box: Box,
        alpha: float,
        zgrid=None,
        cfg: Optional[SolverConfig] = None
) -> CheckReport:
    """Compare ``prox_{(1/alpha) h}(set, z)`` with ``prox_h(set, z)`` on `zgrid`."""
    cfg = cfg or SolverConfig()
    if zgrid is None:
        zgrid, _ = default_grids(f, box, cfg)
    zs = _as_points(zgrid, f.dimension)
    zs = zs[_in_box(box, zs)]
    worst, violator = 0.0, None
    for z in zs:
        scaled = prox(ProxQuery(f, box, z, gamma=1.0 / alpha), cfg)
        plain = prox(ProxQuery(f, box, z), cfg)
        if len(scaled.argmin) != len(plain.argmin) or scaled.attained is not plain.attained:
            diff = INF
        else:
            diff = max(float(np.max(np.abs(np.subtract(p, q)))) for p, q in zip(scaled.argmin, plain.argmin))
        worst = max(worst, diff)
        if violator is None and diff > SCALING_TOL:
            violator = (tuple(z), list(scaled.argmin), list(plain.argmin))
    return CheckReport("scaling", violator is None, int(zs.shape[0]), SCALING_TOL - worst, violator, {"alpha": alpha})


def check_envelope_minimality(
        f: FunctionSpec,
        box: Box,
        alpha: float,
        zgrid=None,
        xgrid=None,
        cfg: Optional[SolverConfig] = None
) -> CheckReport:
    """Check that ``xbar = prox_h(set, z)`` also minimises the ``(1/alpha) h`` prox objective on the x-grid.

    The objective is ``h(x) / alpha + |x - z|^2 / 2``; the check passes when
    its value at ``xbar`` is within ``1e-9`` of the grid minimum for every z.
    """
    cfg = cfg or SolverConfig()
    zs, xs, hx = _prepare(f, box, zgrid, xgrid, cfg)
    worst, violator = INF, None
    for z in zs:
        xbar = prox(ProxQuery(f, box, z), cfg).point
        at_xbar = f.evaluate(xbar) / alpha + 0.5 * float((xbar - z) @ (xbar - z))
        values = hx / alpha + 0.5 * np.sum((xs - z) ** 2, axis=1)
        k = int(np.argmin(values))
        slack = float(values[k]) - at_xbar
        worst = min(worst, slack)
        if violator is None and slack < -ALPHA_TOL:
            violator = (tuple(z), tuple(xbar), tuple(xs[k]))
    return CheckReport("envelope_minimality", violator is None, int(zs.shape[0]), worst, violator, {"alpha": alpha})
