import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .catalog import INF, Box, FunctionSpec, GridSpec, Point, window
from .error import ConfigError, DivergentProxError, MultivaluedProxError, NonseparableError, ProxError
from .golden import golden_section
from .pool import _WorkerPool
from .report import CheckReport, _jsonable
from .state import Attainment, Multiplicity, PieceKind

logger = logging.getLogger(__name__)

PR2_TOL = 1e-9
_GAP_SAMPLES = 7


# ============================================================
# Configuration and records
# ============================================================
@dataclass(frozen=True)
class SolverConfig:
    """Knobs of the prox solver.

    Attributes
    ----------
    grid : GridSpec
        Sampling density and window handling.
    refine_tol : float
        Bracket width at which golden-section refinement stops.
    multiplicity_value_tol : float
        Relative tolerance under which two candidate values count as equal.
    cluster_radius : float
        Candidates closer than this are merged into one minimiser.
    divergence_expansions : int
        Consecutive strictly improving window doublings with the winner on
        the window boundary after which the subproblem is declared unbounded.
    threads : int
        Worker cap for per-cell and per-coordinate work (0 = sequential).
    max_cells : int
        Number of best grid local minima that are refined.
    use_closed_form : bool
        Use a spec's closed-form prox when it has one.
    crosscheck_points : int
        Grid size of the numeric solve a closed form is checked against.
    """

    grid: GridSpec = field(default_factory=GridSpec)
    refine_tol: float = 1e-10
    multiplicity_value_tol: float = 1e-9
    cluster_radius: float = 1e-6
    divergence_expansions: int = 3
    threads: int = 0
    max_cells: int = 8
    use_closed_form: bool = True
    crosscheck_points: int = 257

    def __post_init__(self):
        for name in ("refine_tol", "multiplicity_value_tol", "cluster_radius"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"SolverConfig.{name} must be positive")
        if self.divergence_expansions < 1:
            raise ConfigError("SolverConfig.divergence_expansions must be >= 1")
        if self.max_cells < 1:
            raise ConfigError("SolverConfig.max_cells must be >= 1")
        if self.crosscheck_points < 3:
            raise ConfigError("SolverConfig.crosscheck_points must be >= 3")

    def with_points(self, points: int) -> "SolverConfig":
        """Copy with a different grid density."""
        return replace(self, grid=replace(self.grid, points_per_coordinate=points))


@dataclass(frozen=True)
class ProxQuery:
    """One proximal subproblem ``argmin_{x in set} h(x) + |x - z|^2 / (2 gamma)``.

    Parameters
    ----------
    f : FunctionSpec
        The function h.
    box : Box
        The feasible set K.
    z : point
        Anchor point; must be finite.
    gamma : float, optional
        Prox parameter, defaults to 1.
    level : float, optional
        Sublevel cap: restrict the feasible set to ``{x : h(x) <= level}``.

    Raises
    ------
    EmptyFeasibleSetError
        If the set does not meet the domain of `f`.
    ProxError
        If `z` is not finite or `gamma` is not positive.
    """

    f: FunctionSpec
    box: Box
    z: Tuple[float, ...]
    gamma: float = 1.0
    level: Optional[float] = None

    def __post_init__(self):
        z = tuple(float(v) for v in np.atleast_1d(np.asarray(self.z, dtype=float)).tolist())
        if len(z) != self.f.dimension or self.box.dimension != self.f.dimension:
            raise ProxError(f"Query dimension does not match the {self.f.dimension}-D function '{self.f.id}'")
        if not all(math.isfinite(v) for v in z):
            raise ProxError("Anchor z must be finite")
        if not self.gamma > 0:
            raise ProxError("gamma must be positive")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "gamma", float(self.gamma))
        self.f.feasible(self.box)

    @property
    def zv(self) -> np.ndarray:
        return np.asarray(self.z)


@dataclass(frozen=True)
class ProxResult:
    """Outcome of a prox solve.

    ``argmin`` holds one representative per cluster of minimisers. When
    ``attained`` is DIVERGENT the single stored point is the last window
    winner and ``value`` the objective there.
    """

    argmin: Tuple[Tuple[float, ...], ...]
    value: float
    attained: Attainment
    multiplicity: Multiplicity
    residual: float = 0.0
    evaluations: int = 0

    @property
    def is_single(self) -> bool:
        return self.multiplicity is Multiplicity.SINGLE

    @property
    def point(self) -> np.ndarray:
        """The unique minimiser.

        Raises
        ------
        DivergentProxError
            If the subproblem is unbounded.
        MultivaluedProxError
            If several minimisers were found.
        """
        if self.attained is Attainment.DIVERGENT:
            raise DivergentProxError("The prox subproblem is unbounded below")
        if self.multiplicity is Multiplicity.MULTIPLE:
            raise MultivaluedProxError(f"Prox is multivalued: {list(self.argmin)}")
        return np.asarray(self.argmin[0])

    def to_dict(self) -> dict:
        argmin = [p[0] if len(p) == 1 else list(p) for p in self.argmin]
        return _jsonable({
            "argmin": argmin,
            "value": self.value,
            "attained": self.attained,
            "multiplicity": self.multiplicity,
            "residual": self.residual,
            "evals": self.evaluations,
        })


# ============================================================
# One-dimensional solver
# ============================================================
@dataclass(frozen=True)
class _Candidate:
    x: float
    value: float
    width: float = 0.0
    lo: float = 0.0
    hi: float = 0.0
    limit: float = INF


@dataclass(frozen=True)
class _AxisSolution:
    points: Tuple[float, ...]
    value: float
    attained: Attainment
    residual: float = 0.0
    evaluations: int = 0


def _quadratic_term(x, z: float, gamma: float):
    if math.isinf(gamma):
        return 0.0 * np.asarray(x, dtype=float)
    return (np.asarray(x, dtype=float) - z) ** 2 / (2.0 * gamma)


def _level_cap(level: Optional[float]) -> Optional[float]:
    if level is None:
        return None
    return level + 1e-12 * (1.0 + abs(level))


def _grid_objective(f: FunctionSpec, xs: np.ndarray, z: float, gamma: float, cap: Optional[float]) -> np.ndarray:
    hv = f.evaluate_array(xs)
    obj = hv + _quadratic_term(xs, z, gamma)
    if cap is not None:
        obj = np.where(hv > cap, INF, obj)
    return obj


def _point_objective(f: FunctionSpec, x: float, z: float, gamma: float, cap: Optional[float]) -> float:
    hv = f.evaluate(x)
    if cap is not None and hv > cap:
        return INF
    return float(hv + _quadratic_term(x, z, gamma))


def _scan(f, lo, hi, z, gamma, cap, cfg: SolverConfig):
    """Evaluate the objective on a window grid, doubling the window while the
    winner sticks to an artificial boundary.

    Returns the grid, its objective values, the evaluation count and whether
    the subproblem was judged unbounded.
    """
    grid = cfg.grid
    center = min(max(z, lo), hi)
    radius = max(grid.window_radius, abs(center))
    hits = 0
    previous = None
    evaluations = 0
    xs = vals = None
    for _ in range(grid.expansion_cap + 1):
        wlo, whi = window(lo, hi, radius, center)
        xs = np.linspace(wlo, whi, grid.points_per_coordinate)
        extra = [center]
        if grid.include_breakpoints:
            extra.extend(p for p in f.special_points() if wlo <= p <= whi)
        xs = np.union1d(xs, np.asarray(extra, dtype=float))
        vals = _grid_objective(f, xs, z, gamma, cap)
        evaluations += xs.size
        i = int(np.argmin(vals))
        if not math.isfinite(vals[i]):
            raise ProxError(f"No finite objective value of '{f.id}' on [{wlo}, {whi}]")
        step = (whi - wlo) / (grid.points_per_coordinate - 1)
        on_edge = (math.isinf(hi) and xs[i] >= whi - step) or (math.isinf(lo) and xs[i] <= wlo + step)
        if not on_edge:
            return xs, vals, evaluations, False
        hits = hits + 1 if previous is not None and vals[i] < previous else 0
        previous = vals[i]
        logger.debug("window [%g, %g] winner %g on the boundary (hits=%d)", wlo, whi, xs[i], hits)
        if hits >= cfg.divergence_expansions:
            return xs, vals, evaluations, True
        radius *= 2.0
    return xs, vals, evaluations, True


def _local_minima(vals: np.ndarray, limit: int) -> List[int]:
    padded = np.concatenate(([INF], vals, [INF]))
    mask = (vals <= padded[:-2]) & (vals <= padded[2:]) & np.isfinite(vals)
    idx = np.flatnonzero(mask)
    order = idx[np.argsort(vals[idx], kind="stable")]
    return [int(i) for i in order[:limit]]


def _refine_cell(f, xs, vals, j, z, gamma, cap, cfg: SolverConfig, specials) -> Tuple[List[_Candidate], int]:
    a = float(xs[j - 1]) if j > 0 else float(xs[j])
    b = float(xs[j + 1]) if j < xs.size - 1 else float(xs[j])
    grid_point = _Candidate(float(xs[j]), float(vals[j]), 0.0, a, b)
    if a == b:
        return [grid_point], 0
    candidates: List[_Candidate] = []
    cuts = sorted({a, b, *(s for s in specials if a < s < b)})
    evaluations = 0
    for u, v in zip(cuts, cuts[1:]):
        piece = f.piece_at(0.5 * (u + v))
        if piece is None:
            continue
        counter = [0]

        def g(t, piece=piece, counter=counter):
            counter[0] += 1
            hv = piece.formula(t)
            if cap is not None and hv > cap:
                return INF
            return float(hv + _quadratic_term(t, z, gamma))

        xg, yg, width = golden_section(g, u, v, cfg.refine_tol)
        evaluations += counter[0]
        if xg - u <= 2 * cfg.refine_tol or v - xg <= 2 * cfg.refine_tol:
            end = u if xg - u <= v - xg else v
            limit = g(end)
            candidates.append(_Candidate(end, _point_objective(f, end, z, gamma, cap), width, a, b, limit))
        else:
            candidates.append(_Candidate(xg, _point_objective(f, xg, z, gamma, cap), width, a, b))
    # the raw grid point only survives when no refined point of the cell matches it
    best = min((c.value for c in candidates), default=INF)
    if not math.isfinite(best) or grid_point.value < best - cfg.multiplicity_value_tol * (1.0 + abs(best)):
        candidates.append(grid_point)
    return candidates, evaluations


def _separated(f, left: _Candidate, right: _Candidate, z, gamma, cap, ceiling: float) -> bool:
    """True when the objective rises above `ceiling` somewhere strictly between two candidates."""
    ts = np.linspace(left.x, right.x, _GAP_SAMPLES + 2)[1:-1]
    return any(_point_objective(f, float(t), z, gamma, cap) > ceiling for t in ts)


def _numeric_axis(f, lo, hi, z, gamma, level, cfg: SolverConfig, pool: _WorkerPool) -> _AxisSolution:
    cap = _level_cap(level)
    xs, vals, evaluations, divergent = _scan(f, lo, hi, z, gamma, cap, cfg)
    if divergent:
        i = int(np.argmin(vals))
        logger.debug("prox of '%s' at z=%g diverges", f.id, z)
        return _AxisSolution((float(xs[i]),), float(vals[i]), Attainment.DIVERGENT, 0.0, evaluations)

    specials = f.special_points()
    cells = _local_minima(vals, cfg.max_cells)
    refined = pool._map(lambda j: _refine_cell(f, xs, vals, j, z, gamma, cap, cfg, specials), cells)
    candidates = []
    for cands, count in refined:
        candidates.extend(cands)
        evaluations += count

    best = min(c.value for c in candidates)
    tol = cfg.multiplicity_value_tol * (1.0 + abs(best))
    winners = sorted((c for c in candidates if c.value <= best + tol), key=lambda c: (c.x, c.value))
    clusters: List[List[_Candidate]] = []
    for c in winners:
        if clusters and (
            c.x - clusters[-1][-1].x <= cfg.cluster_radius
            or not _separated(f, clusters[-1][-1], c, z, gamma, cap, best + tol)
        ):
            clusters[-1].append(c)
        else:
            clusters.append([c])
    points = tuple(min(cluster, key=lambda c: c.value).x for cluster in clusters)

    violations = f.lsc_violations()
    touches = any(c.lo <= p <= c.hi for c in winners for p in violations)
    gap = any(c.limit < best - tol for c in candidates)
    attained = Attainment.UNVERIFIED if touches or gap else Attainment.VERIFIED
    if attained is Attainment.UNVERIFIED:
        logger.debug("prox of '%s' at z=%g: attainment unverified near %s", f.id, z, points)
    residual = max(c.width for c in winners)
    return _AxisSolution(points, best, attained, residual, evaluations)


# ------------------------------------------------------------
# Closed forms
# ------------------------------------------------------------
def _closed_quadratic(f: FunctionSpec, lo, hi, z, gamma, cfg: SolverConfig) -> Optional[_AxisSolution]:
    if len(f.pieces) != 1 or f.exceptions:
        return None
    piece = f.pieces[0]
    if piece.kind is not PieceKind.POLY or piece.degree > 2:
        return None
    c = tuple(piece.coeffs) + (0.0,) * (3 - min(len(piece.coeffs), 3))
    a2 = c[2] + 1.0 / (2.0 * gamma)
    b1 = c[1] - z / gamma

    def value(x):
        return _point_objective(f, x, z, gamma, None)

    if a2 > 0:
        x = min(max(-b1 / (2.0 * a2), lo), hi)
        return _AxisSolution((x,), value(x), Attainment.VERIFIED)
    if a2 == 0 and b1 == 0:
        return None
    if (math.isinf(lo) and (a2 < 0 or b1 > 0)) or (math.isinf(hi) and (a2 < 0 or b1 < 0)):
        return _AxisSolution((min(max(z, lo), hi),), -INF, Attainment.DIVERGENT)
    ends = [e for e in (lo, hi) if math.isfinite(e)]
    values = [value(e) for e in ends]
    best = min(values)
    tol = cfg.multiplicity_value_tol * (1.0 + abs(best))
    points = tuple(e for e, v in zip(ends, values) if v <= best + tol)
    return _AxisSolution(points, best, Attainment.VERIFIED)


def _closed_abs(f: FunctionSpec, lo, hi, z, gamma, cfg: SolverConfig) -> Optional[_AxisSolution]:
    if len(f.pieces) != 2 or f.exceptions:
        return None
    s = f.pieces[1].coeffs[1]
    x = math.copysign(max(abs(z) - gamma * s, 0.0), z)
    x = min(max(x, lo), hi)
    return _AxisSolution((x,), _point_objective(f, x, z, gamma, None), Attainment.VERIFIED)


_CLOSED_FORMS = {
    "quadratic": _closed_quadratic,
    "abs": _closed_abs,
}


def closed_form_names() -> Tuple[str, ...]:
    return tuple(sorted(_CLOSED_FORMS))


def _solve_axis(f, lo, hi, z, gamma, level, cfg: SolverConfig, pool: _WorkerPool) -> _AxisSolution:
    name = f.closed_form_prox
    if cfg.use_closed_form and name and level is None and not math.isinf(gamma):
        formula = _CLOSED_FORMS.get(name)
        closed = formula(f, lo, hi, z, gamma, cfg) if formula else None
        if closed is not None:
            coarse = _numeric_axis(f, lo, hi, z, gamma, None, cfg.with_points(cfg.crosscheck_points), pool)
            residual = 0.0
            if coarse.attained is not closed.attained or len(coarse.points) != len(closed.points):
                logger.warning("closed form '%s' of '%s' at z=%g disagrees with the numeric solve", name, f.id, z)
                residual = INF
            elif closed.attained is not Attainment.DIVERGENT:
                residual = max(abs(p - q) for p, q in zip(closed.points, coarse.points))
                if residual > 1e-6:
                    logger.warning(
                        "closed form '%s' of '%s' at z=%g differs from the numeric solve by %.3g",
                        name, f.id, z, residual,
                    )
            return replace(closed, residual=residual, evaluations=coarse.evaluations)
        logger.debug("closed form '%s' not applicable to '%s'; solving numerically", name, f.id)
    return _numeric_axis(f, lo, hi, z, gamma, level, cfg, pool)


def _combine(solutions: Sequence[_AxisSolution]) -> ProxResult:
    rank = {Attainment.VERIFIED: 0, Attainment.UNVERIFIED: 1, Attainment.DIVERGENT: 2}
    attained = max((s.attained for s in solutions), key=rank.__getitem__)
    points = tuple(tuple(p) for p in itertools.product(*(s.points for s in solutions)))
    multiplicity = Multiplicity.MULTIPLE if len(points) > 1 else Multiplicity.SINGLE
    return ProxResult(
        argmin=points,
        value=float(sum(s.value for s in solutions)),
        attained=attained,
        multiplicity=multiplicity,
        residual=float(max(s.residual for s in solutions)),
        evaluations=int(sum(s.evaluations for s in solutions)),
    )


def _solve(f: FunctionSpec, box: Box, z: Sequence[float], gamma: float, level: Optional[float], cfg: SolverConfig) -> ProxResult:
    feasible = f.feasible(box)
    pool = _WorkerPool(cfg.threads)
    if f.dimension == 1:
        return _combine([_solve_axis(f, feasible.lower[0], feasible.upper[0], z[0], gamma, level, cfg, pool)])
    if f.components is None:
        raise NonseparableError(f"Function '{f.id}' has no separable components")
    if level is not None:
        raise ProxError("Sublevel caps are only supported for one-dimensional functions")
    axes = [
        (comp, feasible.lower[i], feasible.upper[i], z[i])
        for i, comp in enumerate(f.components)
    ]
    solutions = pool._map(lambda a: _solve_axis(a[0], a[1], a[2], a[3], gamma, None, cfg, _WorkerPool(0)), axes)
    return _combine(solutions)


# ============================================================
# Public operations
# ============================================================
def objective(q: ProxQuery, x: Point) -> float:
    """``h(x) + |x - z|^2 / (2 gamma)``, ``+inf`` off ``set ∩ dom`` (and off the sublevel cap).

    Examples
    --------
    >>> q = ProxQuery(builtin("negquad"), Box.interval(0, 1), 0.0)
    >>> objective(q, 1.0)
    -1.5
    """
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if not q.box.contains(p):
        return INF
    hv = q.f.evaluate(p)
    cap = _level_cap(q.level)
    if cap is not None and hv > cap:
        return INF
    return float(hv + np.sum((p - q.zv) ** 2) / (2.0 * q.gamma))


def prox(q: ProxQuery, cfg: Optional[SolverConfig] = None) -> ProxResult:
    """Solve the proximal subproblem of `q`.

    One-dimensional subproblems are sampled on a breakpoint-injected grid,
    refined cell by cell with golden-section search and clustered into
    minimisers. Separable 2-D subproblems are solved coordinate-wise.

    Parameters
    ----------
    q : ProxQuery
        The subproblem.
    cfg : SolverConfig, optional
        Solver settings; defaults to `SolverConfig()`.

    Returns
    -------
    ProxResult
        Minimisers, value and attainment/multiplicity diagnosis.

    Raises
    ------
    EmptyFeasibleSetError
        If the set does not meet the domain.
    NonseparableError
        For a 2-D function without separable components.
    """
    cfg = cfg or SolverConfig()
    result = _solve(q.f, q.box, q.z, q.gamma, q.level, cfg)
    logger.debug("prox '%s' z=%s gamma=%g -> %s (%s)", q.f.id, q.z, q.gamma, result.argmin, result.attained.value)
    return result


def minimize(f: FunctionSpec, box: Box, cfg: Optional[SolverConfig] = None) -> ProxResult:
    """Global minimisation of `f` over `box` with the prox machinery (no quadratic term)."""
    cfg = cfg or SolverConfig()
    feasible = f.feasible(box)
    anchor = [min(max(0.0, lo), hi) for lo, hi in zip(feasible.lower, feasible.upper)]
    return _solve(f, box, anchor, INF, None, replace(cfg, use_closed_form=False))


def moreau(q: ProxQuery, cfg: Optional[SolverConfig] = None) -> float:
    """Moreau envelope value: the optimal objective of the prox subproblem.

    Raises
    ------
    DivergentProxError
        If the subproblem is unbounded below.
    """
    result = prox(q, cfg)
    if result.attained is Attainment.DIVERGENT:
        raise DivergentProxError(f"Moreau envelope of '{q.f.id}' at z={q.z} is -inf")
    if result.attained is Attainment.UNVERIFIED:
        logger.warning("Moreau envelope of '%s' at z=%s computed from an unverified minimiser", q.f.id, q.z)
    return result.value


def moreau_gradient(f: FunctionSpec, box: Box, z: Point, alpha: float, cfg: Optional[SolverConfig] = None) -> np.ndarray:
    """``alpha * (z - prox_{(1/alpha) h}(set, z))``.

    Raises
    ------
    MultivaluedProxError
        If the prox is not single-valued at `z`.
    DivergentProxError
        If the subproblem is unbounded.
    """
    if not alpha > 0:
        raise ProxError("alpha must be positive")
    q = ProxQuery(f, box, z, gamma=1.0 / alpha)
    point = prox(q, cfg).point
    return alpha * (q.zv - point)


def _as_points(xs, dimension: int) -> np.ndarray:
    return np.asarray(xs, dtype=float).reshape(-1, dimension)


def _evaluate_points(f: FunctionSpec, pts: np.ndarray) -> np.ndarray:
    return f.evaluate_array(pts[:, 0] if f.dimension == 1 else pts)


def _in_box(box: Box, pts: np.ndarray) -> np.ndarray:
    return np.all((pts >= np.asarray(box.lower)) & (pts <= np.asarray(box.upper)), axis=1)


def check_pr2(q: ProxQuery, xbar: Point, xs) -> CheckReport:
    """Check ``h(xbar) - h(x) <= <xbar + x - 2z, x - xbar> / (2 gamma)`` on samples.

    Samples outside ``set ∩ dom`` are ignored. The verdict passes when every
    slack ``rhs - lhs`` is at least ``-1e-9``.
    """
    dim = q.f.dimension
    xb = np.atleast_1d(np.asarray(xbar, dtype=float))
    pts = _as_points(xs, dim)
    hv = _evaluate_points(q.f, pts)
    keep = _in_box(q.box, pts) & np.isfinite(hv)
    pts, hv = pts[keep], hv[keep]
    hbar = q.f.evaluate(xb)
    lhs = hbar - hv
    rhs = np.einsum("ij,ij->i", xb + pts - 2.0 * q.zv, pts - xb) / (2.0 * q.gamma)
    slack = rhs - lhs
    if slack.size == 0:
        return CheckReport("pr2", True, 0, INF)
    bad = np.flatnonzero(slack < -PR2_TOL)
    violator = None
    if bad.size:
        k = int(bad[0])
        violator = (tuple(pts[k]), float(lhs[k]), float(rhs[k]))
    return CheckReport("pr2", bad.size == 0, int(slack.size), float(slack.min()), violator)
