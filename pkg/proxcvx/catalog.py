import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from .error import CatalogError, EmptyFeasibleSetError, InvalidParameterError, NonseparableError, UnknownFunctionError
from .state import Closure, Continuity, PieceKind

logger = logging.getLogger(__name__)

INF = math.inf

Point = Union[float, Sequence[float], np.ndarray]


def parse_bound(value) -> float:
    """Parse a box bound; accepts numbers and the strings ``"inf"``, ``"+inf"``, ``"-inf"``."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity", "+infinity"):
            return INF
        if text in ("-inf", "-infinity"):
            return -INF
        try:
            return float(text)
        except ValueError:
            raise CatalogError(f"Invalid bound {value!r}")
    return float(value)


def format_bound(value: float):
    """Inverse of `parse_bound` for JSON: infinities become ``"-inf"``/``"+inf"``."""
    if math.isinf(value):
        return "+inf" if value > 0 else "-inf"
    return float(value)


# ============================================================
# Box
# ============================================================
@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box, possibly unbounded in some directions.

    Parameters
    ----------
    lower : tuple of float
        Per-coordinate lower bounds (``-inf`` allowed).
    upper : tuple of float
        Per-coordinate upper bounds (``+inf`` allowed).

    Raises
    ------
    CatalogError
        If the bounds have different lengths, contain NaN, or describe an
        empty box.
    """

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self):
        lower = tuple(parse_bound(v) for v in np.atleast_1d(self.lower).tolist())
        upper = tuple(parse_bound(v) for v in np.atleast_1d(self.upper).tolist())
        if len(lower) != len(upper) or not lower:
            raise CatalogError("Box bounds must have the same, nonzero length")
        for lo, hi in zip(lower, upper):
            if math.isnan(lo) or math.isnan(hi):
                raise CatalogError("Box bounds must not be NaN")
            if lo > hi or lo == INF or hi == -INF:
                raise CatalogError(f"Empty box coordinate [{lo}, {hi}]")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def interval(cls, lo: float = -INF, hi: float = INF) -> "Box":
        """A one-dimensional box ``[lo, hi]``."""
        return cls((lo,), (hi,))

    @classmethod
    def whole(cls, dimension: int = 1) -> "Box":
        """The whole space ``R^dimension``."""
        return cls((-INF,) * dimension, (INF,) * dimension)

    @classmethod
    def parse(cls, text: str) -> "Box":
        """Parse the command-line syntax ``"lo,hi"`` or ``"lo,hi:lo,hi"``.

        Examples
        --------
        >>> Box.parse("0,2:-inf,inf")
        Box(lower=(0.0, -inf), upper=(2.0, inf))
        """
        lower, upper = [], []
        for part in text.split(":"):
            bounds = part.split(",")
            if len(bounds) != 2:
                raise CatalogError(f"Invalid box coordinate {part!r}; expected 'lo,hi'")
            lower.append(parse_bound(bounds[0]))
            upper.append(parse_bound(bounds[1]))
        return cls(tuple(lower), tuple(upper))

    @property
    def dimension(self) -> int:
        return len(self.lower)

    @property
    def is_bounded(self) -> bool:
        return all(math.isfinite(v) for v in self.lower + self.upper)

    def coordinate(self, i: int) -> "Box":
        """The one-dimensional box of coordinate `i`."""
        return Box((self.lower[i],), (self.upper[i],))

    def contains(self, x: Point) -> bool:
        """Check membership of a single point."""
        p = np.atleast_1d(np.asarray(x, dtype=float))
        if p.shape != (self.dimension,) or not np.all(np.isfinite(p)):
            return False
        return bool(np.all(p >= np.asarray(self.lower)) and np.all(p <= np.asarray(self.upper)))

    def intersect(self, other: "Box") -> Optional["Box"]:
        """Intersection of two boxes, or None when it is empty."""
        if other.dimension != self.dimension:
            raise CatalogError("Cannot intersect boxes of different dimension")
        lower = tuple(max(a, b) for a, b in zip(self.lower, other.lower))
        upper = tuple(min(a, b) for a, b in zip(self.upper, other.upper))
        if any(lo > hi for lo, hi in zip(lower, upper)):
            return None
        return Box(lower, upper)

    def clip(self, x: Point) -> np.ndarray:
        return np.clip(np.atleast_1d(np.asarray(x, dtype=float)), self.lower, self.upper)

    def to_dict(self) -> dict:
        if self.dimension == 1:
            return {"lo": format_bound(self.lower[0]), "hi": format_bound(self.upper[0])}
        return {
            "lo": [format_bound(v) for v in self.lower],
            "hi": [format_bound(v) for v in self.upper],
        }

    def __str__(self) -> str:
        return ":".join(f"{format_bound(lo)},{format_bound(hi)}" for lo, hi in zip(self.lower, self.upper))


# ============================================================
# Piece
# ============================================================
@dataclass(frozen=True)
class Piece:
    """One symbolic piece of a scalar function.

    Parameters
    ----------
    lo, hi : float
        Ends of the piece interval (infinite ends allowed).
    closure : Closure
        Which finite ends belong to the piece.
    kind : PieceKind
        ``POLY`` with ascending coefficients ``(c0, c1, c2, c3)`` (degree <= 3),
        or ``LOGAFFINE`` with ``(a, b, c, s)`` meaning ``a x + s ln(1 + b x) + c``.
    coeffs : tuple of float
        Coefficients; LOGAFFINE accepts ``(a, b)``, ``(a, b, c)`` or the full form.
    """

    lo: float
    hi: float
    closure: Closure
    kind: PieceKind
    coeffs: Tuple[float, ...]

    def __post_init__(self):
        lo, hi = parse_bound(self.lo), parse_bound(self.hi)
        if not lo < hi:
            raise CatalogError(f"Piece interval ({lo}, {hi}) is empty")
        closure = self.closure if isinstance(self.closure, Closure) else Closure(self.closure)
        kind = self.kind if isinstance(self.kind, PieceKind) else PieceKind(self.kind)
        coeffs = tuple(float(c) for c in self.coeffs)
        if kind is PieceKind.POLY:
            if not 1 <= len(coeffs) <= 4:
                raise CatalogError("Polynomial pieces take 1 to 4 coefficients (degree <= 3)")
        else:
            if not 2 <= len(coeffs) <= 4:
                raise CatalogError("Log-affine pieces take (a, b[, c[, s]]) coefficients")
            coeffs = coeffs + (0.0, 1.0)[len(coeffs) - 2:]
        if not all(math.isfinite(c) for c in coeffs):
            raise CatalogError("Piece coefficients must be finite")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "closure", closure)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> Optional[int]:
        """Polynomial degree after trimming zero leading terms; None for log pieces."""
        if self.kind is not PieceKind.POLY:
            return None
        trimmed = np.trim_zeros(np.asarray(self.coeffs), "b")
        return max(len(trimmed) - 1, 0)

    def formula(self, x):
        """Evaluate the symbolic expression, ignoring the piece interval.

        Evaluating at an end of the interval gives the one-sided limit from
        inside the piece.
        """
        xs = np.asarray(x, dtype=float)
        if self.kind is PieceKind.POLY:
            out = np.polynomial.polynomial.polyval(xs, self.coeffs)
        else:
            a, b, c, s = self.coeffs
            arg = 1.0 + b * xs
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.where(arg > 0, a * xs + s * np.log(np.where(arg > 0, arg, 1.0)) + c, INF)
        if np.ndim(out) == 0:
            return float(out)
        return out

    def contains(self, x):
        """Vectorised membership test honouring the closure flags."""
        xs = np.asarray(x, dtype=float)
        above = (xs > self.lo) | (self.closure.closed_lo & (xs == self.lo))
        below = (xs < self.hi) | (self.closure.closed_hi & (xs == self.hi))
        return above & below

    def scaled(self, c: float) -> "Piece":
        if self.kind is PieceKind.POLY:
            coeffs = tuple(c * v for v in self.coeffs)
        else:
            a, b, k, s = self.coeffs
            coeffs = (c * a, b, c * k, c * s)
        return replace(self, coeffs=coeffs)

    def to_dict(self) -> dict:
        return {
            "lo": format_bound(self.lo),
            "hi": format_bound(self.hi),
            "closure": self.closure.value,
            "kind": self.kind.value,
            "coeffs": list(self.coeffs),
        }


# ============================================================
# FunctionSpec
# ============================================================
@dataclass(frozen=True)
class FunctionSpec:
    """A piecewise scalar objective, or a separable sum of two of them.

    One-dimensional specs carry ordered `pieces` that tile `domain` exactly.
    Two-dimensional specs carry two one-dimensional `components` and evaluate
    as ``components[0](x1) + components[1](x2)``.

    Parameters
    ----------
    id : str
        Identifier used in reports.
    dimension : int
        1 or 2.
    pieces : tuple of Piece
        Ordered pieces (empty for 2-D specs).
    domain : Box
        Declared domain; evaluation returns ``+inf`` outside it.
    exceptions : tuple of (float, float)
        Single points whose value overrides the piece formula.
    closed_form_prox : str, optional
        Name of a closed-form prox formula known to `prox_core`.
    components : tuple of FunctionSpec, optional
        The two 1-D summands of a separable 2-D spec.

    Raises
    ------
    CatalogError
        If the pieces do not tile the domain, or the components do not match
        the declared domain.
    """

    id: str
    dimension: int
    pieces: Tuple[Piece, ...]
    domain: Box
    exceptions: Tuple[Tuple[float, float], ...] = ()
    closed_form_prox: Optional[str] = None
    components: Optional[Tuple["FunctionSpec", "FunctionSpec"]] = None
    _flags: Dict[float, Continuity] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise CatalogError("Only dimension 1 and 2 are representable")
        if self.domain.dimension != self.dimension:
            raise CatalogError("Domain dimension does not match the spec dimension")
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "exceptions", tuple((float(p), float(v)) for p, v in self.exceptions))
        if self.dimension == 1:
            if self.components is not None:
                raise CatalogError("One-dimensional specs have no components")
            _check_tiling(self.pieces, self.domain)
            for p, v in self.exceptions:
                if not self.domain.contains(p) or not math.isfinite(v):
                    raise CatalogError(f"Exception point {p} must lie in the domain with a finite value")
            object.__setattr__(self, "_flags", self._compute_flags())
        else:
            if self.pieces or self.exceptions:
                raise CatalogError("Two-dimensional specs are described by their components")
            if self.components is not None:
                components = tuple(self.components)
                if len(components) != 2 or any(c.dimension != 1 for c in components):
                    raise CatalogError("A separable spec needs exactly two 1-D components")
                for i, comp in enumerate(components):
                    if comp.domain != self.domain.coordinate(i):
                        raise CatalogError(f"Component {i} domain does not match coordinate {i} of the domain")
                object.__setattr__(self, "components", components)
            object.__setattr__(self, "_flags", {})

    # ---------------------------------------------------------
    # Structure
    # ---------------------------------------------------------
    @property
    def is_separable(self) -> bool:
        return self.dimension == 1 or self.components is not None

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        """Interior piece boundaries, strictly increasing."""
        return tuple(p.lo for p in self.pieces[1:])

    @property
    def exception_points(self) -> Tuple[float, ...]:
        return tuple(sorted(p for p, _ in self.exceptions))

    @property
    def continuity_flags(self) -> Dict[float, Continuity]:
        """Continuity class of every breakpoint."""
        return dict(self._flags)

    def special_points(self) -> Tuple[float, ...]:
        """Breakpoints and exception points, where the formula changes."""
        return tuple(sorted(set(self.breakpoints) | set(self.exception_points)))

    def lsc_violations(self) -> Tuple[float, ...]:
        """Points where lower semicontinuity fails: not-lsc breakpoints and exceptions above their limits."""
        points = [b for b, flag in self._flags.items() if flag is Continuity.NOT_LSC]
        for p, v in self.exceptions:
            piece = self._formula_piece(p)
            if piece is not None and v > piece.formula(p):
                points.append(p)
        return tuple(sorted(set(points)))

    def piece_at(self, x: float) -> Optional[Piece]:
        """The piece claiming `x` under the closure convention."""
        for piece in self.pieces:
            if piece.contains(x):
                return piece
        return None

    def one_sided_limits(self, b: float) -> Tuple[float, float, float]:
        """Return ``(left limit, value, right limit)`` at breakpoint `b`."""
        i = self.breakpoints.index(b)
        left = self.pieces[i].formula(b)
        right = self.pieces[i + 1].formula(b)
        return left, self.evaluate(b), right

    def _formula_piece(self, x: float) -> Optional[Piece]:
        for piece in self.pieces:
            if piece.lo <= x <= piece.hi:
                return piece
        return None

    def _compute_flags(self) -> Dict[float, Continuity]:
        flags = {}
        for b in self.breakpoints:
            left, value, right = self.one_sided_limits(b)
            tol = 1e-12 * (1.0 + abs(value))
            if abs(left - value) <= tol and abs(right - value) <= tol:
                flags[b] = Continuity.CONTINUOUS
            elif value <= min(left, right) + tol:
                flags[b] = Continuity.LSC
            else:
                flags[b] = Continuity.NOT_LSC
        return flags

    # ---------------------------------------------------------
    # Evaluation
    # ---------------------------------------------------------
    def evaluate(self, x: Point) -> float:
        """Evaluate at a single point; ``+inf`` outside the declared domain.

        Raises
        ------
        NonseparableError
            For a 2-D spec without components.
        CatalogError
            If `x` does not have the spec's dimension.
        """
        p = np.atleast_1d(np.asarray(x, dtype=float))
        if p.shape != (self.dimension,):
            raise CatalogError(f"Point of shape {p.shape} for a {self.dimension}-D function")
        if self.dimension == 2:
            if self.components is None:
                raise NonseparableError(f"Function '{self.id}' is not separable")
            return self.components[0].evaluate(p[0]) + self.components[1].evaluate(p[1])
        xv = float(p[0])
        if not self.domain.contains(xv):
            return INF
        for q, v in self.exceptions:
            if xv == q:
                return v
        piece = self.piece_at(xv)
        if piece is None:
            return INF
        return float(piece.formula(xv))

    def evaluate_array(self, xs: np.ndarray) -> np.ndarray:
        """Vectorised evaluation.

        Parameters
        ----------
        xs : numpy.ndarray
            Shape ``(m,)`` for 1-D specs or ``(m, 2)`` for 2-D specs.
        """
        xs = np.asarray(xs, dtype=float)
        if self.dimension == 2:
            if self.components is None:
                raise NonseparableError(f"Function '{self.id}' is not separable")
            xs = xs.reshape(-1, 2)
            return self.components[0].evaluate_array(xs[:, 0]) + self.components[1].evaluate_array(xs[:, 1])
        xs = xs.reshape(-1)
        out = np.full(xs.shape, INF)
        for piece in self.pieces:
            mask = piece.contains(xs)
            if np.any(mask):
                out[mask] = piece.formula(xs[mask])
        for q, v in self.exceptions:
            out[xs == q] = v
        out[~np.isfinite(xs)] = INF
        return out

    # ---------------------------------------------------------
    # Derived specs
    # ---------------------------------------------------------
    def scaled(self, c: float) -> "FunctionSpec":
        """The function ``c * h`` for ``c > 0``."""
        if not c > 0:
            raise InvalidParameterError("Scale factor must be positive")
        if self.dimension == 2:
            components = None
            if self.components is not None:
                components = tuple(comp.scaled(c) for comp in self.components)
            return replace(self, id=f"{c:g}*{self.id}", components=components)
        return replace(
            self,
            id=f"{c:g}*{self.id}",
            pieces=tuple(p.scaled(c) for p in self.pieces),
            exceptions=tuple((p, c * v) for p, v in self.exceptions),
        )

    def feasible(self, box: Box) -> Box:
        """``box ∩ domain``.

        Raises
        ------
        EmptyFeasibleSetError
            If the intersection is empty.
        """
        result = self.domain.intersect(box)
        if result is None:
            raise EmptyFeasibleSetError(f"Set {box} does not meet the domain of '{self.id}'")
        return result


def _check_tiling(pieces: Tuple[Piece, ...], domain: Box) -> None:
    if not pieces:
        raise CatalogError("A one-dimensional spec needs at least one piece")
    lo, hi = domain.lower[0], domain.upper[0]
    first, last = pieces[0], pieces[-1]
    if first.lo != lo or last.hi != hi:
        raise CatalogError("Pieces must start and end at the domain bounds")
    if math.isfinite(lo) and not first.closure.closed_lo:
        raise CatalogError("The first piece must contain the closed lower domain bound")
    if math.isfinite(hi) and not last.closure.closed_hi:
        raise CatalogError("The last piece must contain the closed upper domain bound")
    for prev, nxt in zip(pieces, pieces[1:]):
        if prev.hi != nxt.lo:
            raise CatalogError(f"Pieces leave a gap or overlap between {prev.hi} and {nxt.lo}")
        if prev.closure.closed_hi == nxt.closure.closed_lo:
            what = "overlap" if prev.closure.closed_hi else "gap"
            raise CatalogError(f"Pieces {what} at breakpoint {prev.hi}")


# ============================================================
# Sampling grids
# ============================================================
@dataclass(frozen=True)
class GridSpec:
    """Sampling density of the prox solver.

    Attributes
    ----------
    points_per_coordinate : int
        Uniform grid points per coordinate (>= 3).
    include_breakpoints : bool
        Inject breakpoints and exception points into the grid.
    window_radius : float
        Initial half-width of the search window on unbounded coordinates.
    expansion_cap : int
        Maximum number of window doublings.
    """

    points_per_coordinate: int = 4097
    include_breakpoints: bool = True
    window_radius: float = 16.0
    expansion_cap: int = 12

    def __post_init__(self):
        if self.points_per_coordinate < 3:
            raise CatalogError("points_per_coordinate must be >= 3")
        if not self.window_radius > 0:
            raise CatalogError("window_radius must be positive")
        if self.expansion_cap < 1:
            raise CatalogError("expansion_cap must be positive")


def window(lo: float, hi: float, radius: float, center: float = 0.0) -> Tuple[float, float]:
    """Finite window inside ``[lo, hi]``: the interval itself when bounded."""
    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi
    if math.isfinite(lo):
        return lo, max(lo, center) + 2 * radius
    if math.isfinite(hi):
        return min(hi, center) - 2 * radius, hi
    return center - radius, center + radius


def _axis_grid(f: FunctionSpec, lo: float, hi: float, points: int, radius: float, include_breakpoints: bool) -> np.ndarray:
    wlo, whi = window(lo, hi, radius)
    grid = np.linspace(wlo, whi, points)
    if include_breakpoints:
        extra = [p for p in f.special_points() if wlo <= p <= whi]
        grid = np.union1d(grid, np.asarray(extra, dtype=float))
    return grid


def sample_grid(
        f: FunctionSpec,
        box: Box,
        points: int = 33,
        window_radius: float = 16.0,
        include_breakpoints: bool = True
) -> np.ndarray:
    """Breakpoint-injected sample grid over ``box ∩ dom f``.

    Unbounded coordinates are sampled on a finite window of the given radius.
    Two-dimensional specs get the cartesian product of per-coordinate grids.

    Returns
    -------
    numpy.ndarray
        Shape ``(m,)`` for 1-D specs, ``(m, 2)`` for 2-D specs.
    """
    feasible = f.feasible(box)
    if f.dimension == 1:
        return _axis_grid(f, feasible.lower[0], feasible.upper[0], points, window_radius, include_breakpoints)
    if f.components is None:
        raise NonseparableError(f"Function '{f.id}' is not separable")
    axes = [
        _axis_grid(comp, feasible.lower[i], feasible.upper[i], points, window_radius, include_breakpoints)
        for i, comp in enumerate(f.components)
    ]
    g1, g2 = np.meshgrid(axes[0], axes[1], indexing="ij")
    return np.column_stack([g1.ravel(), g2.ravel()])


# ============================================================
# Builtin library
# ============================================================
_BUILTINS: Dict[str, Callable[..., FunctionSpec]] = {}


def _builtin(name: str):
    """Register a builtin factory under `name`."""
    def _decorator(func):
        _BUILTINS[name] = func
        return func
    return _decorator


def _single(
        id: str,
        lo: float,
        hi: float,
        coeffs: Iterable[float],
        closure: Closure = Closure.BOTH,
        closed_form: Optional[str] = None,
        exceptions: Tuple[Tuple[float, float], ...] = ()
) -> FunctionSpec:
    if not math.isfinite(lo) and not math.isfinite(hi):
        closure = Closure.OPEN
    elif not math.isfinite(hi):
        closure = Closure.LEFT
    elif not math.isfinite(lo):
        closure = Closure.RIGHT
    piece = Piece(lo, hi, closure, PieceKind.POLY, tuple(coeffs))
    return FunctionSpec(id, 1, (piece,), Box.interval(lo, hi), exceptions, closed_form)


def builtin_names() -> Tuple[str, ...]:
    return tuple(sorted(_BUILTINS))


def builtin(name: str, params: Optional[dict] = None, **kwargs) -> FunctionSpec:
    """Build a library function by name.

    Parameters
    ----------
    name : str
        One of `builtin_names()`.
    params : dict, optional
        Parameters of the family (e.g. ``{"n": 4}`` for staircase); keyword
        arguments are merged in.

    Raises
    ------
    UnknownFunctionError
        If `name` is not registered.
    InvalidParameterError
        If the parameters are unknown or out of range.
    """
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise UnknownFunctionError(f"Unknown builtin '{name}'; choose from {', '.join(builtin_names())}")
    merged = dict(params or {})
    merged.update(kwargs)
    try:
        return factory(**merged)
    except TypeError as exc:
        raise InvalidParameterError(f"Invalid parameters for '{name}': {exc}")


def _require_int(value, name: str, minimum: int) -> int:
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise InvalidParameterError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return value


@_builtin("negquad")
def _negquad(r: float = 1.0) -> FunctionSpec:
    """-x^2 - x on [0, r]: strongly quasiconvex, concave, prox-convex."""
    if not float(r) > 0:
        raise InvalidParameterError("r must be positive")
    r = float(r)
    spec_id = "negquad" if r == 1.0 else f"negquad(r={r:g})"
    return _single(spec_id, 0.0, r, (0.0, -1.0, -1.0), closed_form="quadratic")


@_builtin("staircase")
def _staircase(n: int = 3) -> FunctionSpec:
    """1 - x^3 on [1, 2] and 1 - x^3 - k on (k, k+1]: neither convex nor lsc."""
    n = _require_int(n, "n", 3)
    pieces = [Piece(1.0, 2.0, Closure.BOTH, PieceKind.POLY, (1.0, 0.0, 0.0, -1.0))]
    for k in range(2, n):
        pieces.append(Piece(float(k), float(k + 1), Closure.RIGHT, PieceKind.POLY, (1.0 - k, 0.0, 0.0, -1.0)))
    return FunctionSpec(f"staircase(n={n})", 1, tuple(pieces), Box.interval(1.0, float(n)))


@_builtin("logaffine")
def _logaffine() -> FunctionSpec:
    """5x + ln(1 + 10x) on [1, 2]."""
    piece = Piece(1.0, 2.0, Closure.BOTH, PieceKind.LOGAFFINE, (5.0, 10.0, 0.0, 1.0))
    return FunctionSpec("logaffine", 1, (piece,), Box.interval(1.0, 2.0))


@_builtin("cubic_shifted")
def _cubic_shifted(n: int = 3) -> FunctionSpec:
    """x^3 on [-n, +inf): quasiconvex, neither convex nor strongly quasiconvex."""
    n = _require_int(n, "n", 1)
    return _single(f"cubic_shifted(n={n})", -float(n), INF, (0.0, 0.0, 0.0, 1.0))


@_builtin("negcubic")
def _negcubic() -> FunctionSpec:
    """-x^3 on R: not 2-weakly coercive, empty prox everywhere."""
    return _single("negcubic", -INF, INF, (0.0, 0.0, 0.0, -1.0))


@_builtin("quad2d")
def _quad2d() -> FunctionSpec:
    """x2^2 - x1^2 - x1 on [0, 2] x R, as a separable sum."""
    first = _single("quad2d.x1", 0.0, 2.0, (0.0, -1.0, -1.0), closed_form="quadratic")
    second = _single("quad2d.x2", -INF, INF, (0.0, 0.0, 1.0), closed_form="quadratic")
    return FunctionSpec(
        "quad2d", 2, (), Box((0.0, -INF), (2.0, INF)),
        closed_form_prox="quadratic", components=(first, second),
    )


@_builtin("abs")
def _abs() -> FunctionSpec:
    pieces = (
        Piece(-INF, 0.0, Closure.OPEN, PieceKind.POLY, (0.0, -1.0)),
        Piece(0.0, INF, Closure.LEFT, PieceKind.POLY, (0.0, 1.0)),
    )
    return FunctionSpec("abs", 1, pieces, Box.interval(), closed_form_prox="abs")


@_builtin("halfsquare")
def _halfsquare() -> FunctionSpec:
    return _single("halfsquare", -INF, INF, (0.0, 0.0, 0.5), closed_form="quadratic")


@_builtin("indicator_spike")
def _indicator_spike() -> FunctionSpec:
    """h(0) = 1 and h(x) = 0 elsewhere: semistrictly quasiconvex, not prox-convex."""
    return _single("indicator_spike", -INF, INF, (0.0,), exceptions=((0.0, 1.0),))


@_builtin("negabs")
def _negabs() -> FunctionSpec:
    """-|x|: 2-weakly coercive without being weakly coercive."""
    pieces = (
        Piece(-INF, 0.0, Closure.OPEN, PieceKind.POLY, (0.0, 1.0)),
        Piece(0.0, INF, Closure.LEFT, PieceKind.POLY, (0.0, -1.0)),
    )
    return FunctionSpec("negabs", 1, pieces, Box.interval())


@_builtin("constant")
def _constant(c: float = 0.0) -> FunctionSpec:
    return _single("constant" if c == 0 else f"constant(c={c:g})", -INF, INF, (float(c),), closed_form="quadratic")


@_builtin("minabs")
def _minabs() -> FunctionSpec:
    """min{|x|, 1}: quasiconvex without being semistrictly quasiconvex."""
    pieces = (
        Piece(-INF, -1.0, Closure.OPEN, PieceKind.POLY, (1.0,)),
        Piece(-1.0, 0.0, Closure.LEFT, PieceKind.POLY, (0.0, -1.0)),
        Piece(0.0, 1.0, Closure.LEFT, PieceKind.POLY, (0.0, 1.0)),
        Piece(1.0, INF, Closure.LEFT, PieceKind.POLY, (1.0,)),
    )
    return FunctionSpec("minabs", 1, pieces, Box.interval())


@_builtin("kinked")
def _kinked() -> FunctionSpec:
    """min{x, max{x - 1, 0}}: its convex, Gutierrez and Plastria subdifferentials differ."""
    pieces = (
        Piece(-INF, 0.0, Closure.OPEN, PieceKind.POLY, (0.0, 1.0)),
        Piece(0.0, 1.0, Closure.LEFT, PieceKind.POLY, (0.0,)),
        Piece(1.0, INF, Closure.LEFT, PieceKind.POLY, (-1.0, 1.0)),
    )
    return FunctionSpec("kinked", 1, pieces, Box.interval())


def evaluate(f: FunctionSpec, x: Point) -> float:
    """Evaluate `f` at `x` with the extended-real convention (``+inf`` off the domain)."""
    return f.evaluate(x)
