import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .catalog import INF, Box, FunctionSpec, sample_grid, window
from .prox_core import _evaluate_points, _in_box
from .report import ProbeReport, _jsonable
from .state import Coercivity, ProbeVerdict, QcxKind

logger = logging.getLogger(__name__)

QCX_TOL = 1e-9
STRICT_MARGIN = 1e-12
IDENTITY_TOL = 1e-12

#: default lattice points per coordinate, by dimension
LATTICE_POINTS = {1: 65, 2: 9}
DEFAULT_RADII = (10.0, 1e2, 1e3, 1e4)

_LADDER = (
    Coercivity.SUPERCOERCIVE,
    Coercivity.COERCIVE,
    Coercivity.WEAKLY_COERCIVE,
    Coercivity.TWO_WEAKLY_COERCIVE,
    Coercivity.NOT_TWO_WEAKLY_COERCIVE,
)


# ============================================================
# Triples
# ============================================================
@dataclass(frozen=True)
class Triples:
    """Sample triples ``(x, y, lambda)`` for the quasiconvexity probes.

    Attributes
    ----------
    x, y : numpy.ndarray
        Shape ``(n, dimension)``.
    lam : numpy.ndarray
        Shape ``(n,)``, values in ``[0, 1]``.
    """

    x: np.ndarray
    y: np.ndarray
    lam: np.ndarray

    def __len__(self) -> int:
        return int(self.lam.shape[0])

    def __add__(self, other: "Triples") -> "Triples":
        return Triples(
            np.concatenate([self.x, other.x]),
            np.concatenate([self.y, other.y]),
            np.concatenate([self.lam, other.lam]),
        )

    def midpoints(self) -> np.ndarray:
        return self.lam[:, None] * self.y + (1.0 - self.lam[:, None]) * self.x


def _feasible_points(f: FunctionSpec, box: Box, pts: np.ndarray) -> np.ndarray:
    pts = pts.reshape(len(pts), f.dimension)
    keep = _in_box(box, pts) & np.isfinite(_evaluate_points(f, pts))
    return pts[keep]


def lattice_triples(
        f: FunctionSpec,
        box: Box,
        points: Optional[int] = None,
        lambdas: int = 11,
        window_radius: float = 16.0
) -> Triples:
    """All ordered pairs ``x != y`` of a lattice over ``set ∩ dom``, times a uniform lambda grid."""
    pts = _feasible_points(f, box, sample_grid(f, box, points or LATTICE_POINTS[f.dimension], window_radius))
    i, j = np.meshgrid(np.arange(len(pts)), np.arange(len(pts)), indexing="ij")
    mask = i != j
    i, j = i[mask], j[mask]
    lam = np.linspace(0.0, 1.0, lambdas)
    return Triples(
        np.repeat(pts[i], lambdas, axis=0),
        np.repeat(pts[j], lambdas, axis=0),
        np.tile(lam, len(i)),
    )


def random_triples(f: FunctionSpec, box: Box, count: int = 1000, seed: int = 0, window_radius: float = 16.0) -> Triples:
    """Uniform random triples over the (windowed) ``set ∩ dom``."""
    feasible = f.feasible(box)
    rng = np.random.default_rng(seed)
    bounds = np.array([window(lo, hi, window_radius) for lo, hi in zip(feasible.lower, feasible.upper)])
    xs = _feasible_points(f, box, rng.uniform(bounds[:, 0], bounds[:, 1], size=(count, f.dimension)))
    ys = _feasible_points(f, box, rng.uniform(bounds[:, 0], bounds[:, 1], size=(count, f.dimension)))
    n = min(len(xs), len(ys))
    return Triples(xs[:n], ys[:n], rng.uniform(0.0, 1.0, size=n))


# ============================================================
# Quasiconvexity probes
# ============================================================
def _triple_values(f: FunctionSpec, box: Box, triples: Triples):
    keep = (
        _in_box(box, triples.x) & _in_box(box, triples.y)
        & np.isfinite(_evaluate_points(f, triples.x)) & np.isfinite(_evaluate_points(f, triples.y))
    )
    t = Triples(triples.x[keep], triples.y[keep], triples.lam[keep])
    hx = _evaluate_points(f, t.x)
    hy = _evaluate_points(f, t.y)
    hm = _evaluate_points(f, t.midpoints())
    return t, hx, hy, hm


def quasiconvexity_probe(
        kind: QcxKind,
        f: FunctionSpec,
        box: Box,
        triples: Triples,
        beta: float = 1.0
) -> ProbeReport:
    """Check a quasiconvexity inequality at every triple.

    Parameters
    ----------
    kind : QcxKind
        ``QUASICONVEX``: ``h(m) <= max{h(x), h(y)}``.
        ``SEMISTRICT``: ``h(m) < max`` whenever ``h(x) != h(y)`` and ``0 < lambda < 1``.
        ``STRICT``: ``h(m) < max`` whenever ``x != y`` and ``0 < lambda < 1``.
        ``STRONG``: ``h(m) <= max - lambda (1 - lambda) (beta / 2) |x - y|^2``.
    f : FunctionSpec
        Probed function.
    box : Box
        Triples outside ``set ∩ dom`` are dropped.
    triples : Triples
        Sample triples, ``m = lambda y + (1 - lambda) x``.
    beta : float, optional
        Modulus of the STRONG probe.

    Returns
    -------
    ProbeReport
        ``violator`` holds the first offending triple with both sides.
    """
    kind = QcxKind(kind)
    t, hx, hy, hm = _triple_values(f, box, triples)
    top = np.maximum(hx, hy)
    tol = QCX_TOL * (1.0 + np.abs(top))
    margin = STRICT_MARGIN * (1.0 + np.abs(top))
    interior = (t.lam > 0) & (t.lam < 1)

    if kind is QcxKind.QUASICONVEX:
        rhs = top
        bad = hm > rhs + tol
    elif kind is QcxKind.STRONG:
        dist2 = np.sum((t.x - t.y) ** 2, axis=1)
        rhs = top - t.lam * (1.0 - t.lam) * (beta / 2.0) * dist2
        bad = hm > rhs + tol
    elif kind is QcxKind.STRICT:
        rhs = top
        distinct = np.any(t.x != t.y, axis=1)
        bad = distinct & interior & ~(hm < rhs - margin)
    else:
        rhs = top
        unequal = np.abs(hx - hy) > tol
        bad = unequal & interior & ~(hm < rhs - margin)

    label = f"strong(beta={beta:g})" if kind is QcxKind.STRONG else kind.value
    idx = np.flatnonzero(bad)
    violator = None
    if idx.size:
        k = int(idx[0])
        violator = {
            "x": t.x[k], "y": t.y[k], "lambda": t.lam[k],
            "lhs": hm[k], "rhs": rhs[k],
        }
        logger.debug("%s probe of '%s' violated at %s", label, f.id, violator)
    verdict = ProbeVerdict.VIOLATED if idx.size else ProbeVerdict.CONSISTENT
    return ProbeReport(label, verdict, len(t), violator)


def estimate_strong_qcx_modulus(f: FunctionSpec, box: Box, triples: Triples) -> float:
    """Largest beta for which the STRONG probe is consistent on `triples`.

    Returns ``+inf`` when no triple constrains beta, and a negative number when
    even plain quasiconvexity fails.
    """
    t, hx, hy, hm = _triple_values(f, box, triples)
    top = np.maximum(hx, hy)
    weight = t.lam * (1.0 - t.lam) * np.sum((t.x - t.y) ** 2, axis=1) / 2.0
    informative = weight > 0
    if not np.any(informative):
        return INF
    slack = top - hm + QCX_TOL * (1.0 + np.abs(top))
    return float(np.min(slack[informative] / weight[informative]))


# ============================================================
# Coercivity
# ============================================================
@dataclass(frozen=True)
class CoercivityReport:
    """Heuristic coercivity classification from ray samples.

    ``levels`` flags every ladder level the probe data supports; the
    classification is the strongest of them over the weakest direction.
    """

    classification: Coercivity
    levels: Dict[str, bool] = field(default_factory=dict)
    directions: Tuple[dict, ...] = ()
    heuristic: bool = True

    def to_dict(self) -> dict:
        return _jsonable({
            "classification": self.classification,
            "levels": self.levels,
            "directions": list(self.directions),
            "heuristic": self.heuristic,
        })


def _default_directions(dimension: int) -> List[np.ndarray]:
    if dimension == 1:
        return [np.array([1.0]), np.array([-1.0])]
    axes = [np.array(v, dtype=float) for v in ((1, 0), (-1, 0), (0, 1), (0, -1))]
    diagonals = [np.array(v, dtype=float) / math.sqrt(2.0) for v in ((1, 1), (1, -1), (-1, 1), (-1, -1))]
    return axes + diagonals


def _shrinks(ratio_a: float, ratio_b: float) -> bool:
    return ratio_b >= 0 or abs(ratio_b) <= 0.5 * abs(ratio_a)


def _levels(values: np.ndarray, radii: np.ndarray) -> Dict[Coercivity, bool]:
    ha, hb = values[-2], values[-1]
    ra, rb = radii[-2], radii[-1]
    r1a, r1b = ha / ra, hb / rb
    r2a, r2b = ha / ra ** 2, hb / rb ** 2
    return {
        Coercivity.SUPERCOERCIVE: bool(r1b > 0 and r1b >= 1.5 * r1a),
        Coercivity.COERCIVE: bool(hb > 0 and hb >= 1.5 * ha),
        Coercivity.WEAKLY_COERCIVE: bool(_shrinks(r1a, r1b)),
        Coercivity.TWO_WEAKLY_COERCIVE: bool(_shrinks(r2a, r2b)),
        Coercivity.NOT_TWO_WEAKLY_COERCIVE: True,
    }


def _strongest(levels: Dict[Coercivity, bool]) -> Coercivity:
    for level in _LADDER:
        if levels[level]:
            return level
    return Coercivity.NOT_TWO_WEAKLY_COERCIVE


def coercivity_probe(
        f: FunctionSpec,
        directions: Optional[Sequence[Sequence[float]]] = None,
        radii: Sequence[float] = DEFAULT_RADII
) -> CoercivityReport:
    """Classify `f` on the coercivity ladder from its values along rays.

    ``h(r d)/r`` and ``h(r d)/r^2`` are compared at the last two radii of
    every direction that stays in the domain. Directions that leave the
    domain are skipped; when all of them do the result is BOUNDED_DOMAIN.

    Raises
    ------
    ValueError
        If `radii` is not strictly increasing or has fewer than two entries.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size < 2 or np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be strictly increasing with at least two entries")
    dirs = [np.asarray(d, dtype=float) for d in directions] if directions is not None else _default_directions(f.dimension)

    rows = []
    per_direction = []
    for d in dirs:
        d = d / np.linalg.norm(d)
        pts = radii[:, None] * d[None, :]
        values = _evaluate_points(f, pts)
        if not np.all(np.isfinite(values)):
            logger.debug("direction %s leaves the domain of '%s'; skipped", d, f.id)
            continue
        levels = _levels(values, radii)
        per_direction.append(levels)
        rows.append({
            "direction": d, "values": values,
            "classification": _strongest(levels),
        })

    if not per_direction:
        return CoercivityReport(Coercivity.BOUNDED_DOMAIN, {}, (), True)
    combined = {level: all(levels[level] for levels in per_direction) for level in _LADDER}
    classification = _strongest(combined)
    logger.info("coercivity of '%s': %s (heuristic)", f.id, classification.value)
    return CoercivityReport(classification, {k.value: v for k, v in combined.items()}, tuple(rows), True)


# ============================================================
# Identities
# ============================================================
def identity_selftest(samples: int = 1000, seed: int = 0, dimension: int = 3) -> ProbeReport:
    """Check the three-point identity and the convex-combination norm identity.

    ``<x - z, y - x> = (|z - y|^2 - |x - z|^2 - |y - x|^2) / 2`` and
    ``|b x + (1 - b) y|^2 = b |x|^2 + (1 - b) |y|^2 - b (1 - b) |x - y|^2``,
    on random samples plus the zero case and the endpoints ``b in {0, 1}``.
    """
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(samples, dimension)) * 10.0
    y = rng.normal(size=(samples, dimension)) * 10.0
    z = rng.normal(size=(samples, dimension)) * 10.0
    beta = rng.uniform(-2.0, 3.0, size=samples)
    zero = np.zeros((1, dimension))
    x = np.concatenate([x, zero, x[:2]])
    y = np.concatenate([y, zero, y[:2]])
    z = np.concatenate([z, zero, z[:2]])
    beta = np.concatenate([beta, [0.5, 0.0, 1.0]])

    def sq(v):
        return np.sum(v * v, axis=1)

    lhs1 = np.sum((x - z) * (y - x), axis=1)
    rhs1 = 0.5 * (sq(z - y) - sq(x - z) - sq(y - x))
    scale1 = sq(z - y) + sq(x - z) + sq(y - x)
    comb = beta[:, None] * x + (1.0 - beta[:, None]) * y
    lhs2 = sq(comb)
    rhs2 = beta * sq(x) + (1.0 - beta) * sq(y) - beta * (1.0 - beta) * sq(x - y)
    scale2 = np.abs(beta) * sq(x) + np.abs(1.0 - beta) * sq(y) + np.abs(beta * (1.0 - beta)) * sq(x - y)

    for name, lhs, rhs, scale in (("three_point", lhs1, rhs1, scale1), ("combination", lhs2, rhs2, scale2)):
        bad = np.flatnonzero(np.abs(lhs - rhs) > IDENTITY_TOL * (1.0 + scale))
        if bad.size:
            k = int(bad[0])
            return ProbeReport("identities", ProbeVerdict.VIOLATED, 2 * len(beta),
                               {"identity": name, "index": k, "lhs": lhs[k], "rhs": rhs[k]})
    return ProbeReport("identities", ProbeVerdict.CONSISTENT, 2 * len(beta))
