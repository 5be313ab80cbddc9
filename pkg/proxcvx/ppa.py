import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .catalog import Box, FunctionSpec, Point
from .error import ConfigError, InfeasiblePointError
from .prox_core import ProxQuery, ProxResult, SolverConfig, prox
from .report import CheckReport, _jsonable
from .state import Attainment, Multiplicity, StepMode, StopReason
from .writer import TraceRowAdapter, TraceWriter

logger = logging.getLogger(__name__)

MONOTONE_TOL = 1e-12


def _point(x: Point) -> Tuple[float, ...]:
    return tuple(float(v) for v in np.atleast_1d(np.asarray(x, dtype=float)).tolist())


@dataclass(frozen=True)
class PPAConfig:
    """Parameters of the proximal point iteration.

    Attributes
    ----------
    x0 : point
        Starting point; must lie in ``set ∩ dom``.
    max_iters : int
        Maximum number of prox steps.
    step_tol : float
        Stop when ``|x^{k+1} - x^k| <= step_tol``.
    value_tol : float
        Stop when ``0 <= h(x^k) - h(x^{k+1}) <= value_tol``.
    known_min : point, optional
        A minimiser used for the Fejer distances of the trace.
    gamma : float
        Prox parameter; the convergence guarantee covers ``gamma = 1`` only.
    step_mode : StepMode
        BOX steps ``prox_h(K, x^k)``; SUBLEVEL steps
        ``prox_h(K ∩ {h <= h(x^k)}, x^k)``.
    """

    x0: Tuple[float, ...]
    max_iters: int = 200
    step_tol: float = 1e-10
    value_tol: float = 1e-12
    known_min: Optional[Tuple[float, ...]] = None
    gamma: float = 1.0
    step_mode: StepMode = StepMode.BOX

    def __post_init__(self):
        object.__setattr__(self, "x0", _point(self.x0))
        if self.known_min is not None:
            object.__setattr__(self, "known_min", _point(self.known_min))
        object.__setattr__(self, "step_mode", StepMode(self.step_mode))
        if self.max_iters < 1:
            raise ConfigError("PPAConfig.max_iters must be >= 1")
        for name in ("step_tol", "value_tol", "gamma"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"PPAConfig.{name} must be positive")


@dataclass(frozen=True)
class PPATrace:
    """The iterates of one run with their instrumentation.

    ``iterates[0]`` is ``x0``; ``step_norms[0]`` is 0. ``fejer_distances`` is
    empty unless the run had a known minimiser.
    """

    f: FunctionSpec
    box: Box
    iterates: Tuple[Tuple[float, ...], ...]
    values: Tuple[float, ...]
    step_norms: Tuple[float, ...]
    fejer_distances: Tuple[float, ...]
    stop_reason: StopReason
    diagnostic: str = ""

    def __len__(self) -> int:
        return len(self.iterates)

    @property
    def final(self) -> np.ndarray:
        return np.asarray(self.iterates[-1])

    def rows(self):
        """``(k, x, h, step_norm, fejer_dist)`` tuples in iteration order."""
        for k, (x, h, s) in enumerate(zip(self.iterates, self.values, self.step_norms)):
            fejer = self.fejer_distances[k] if self.fejer_distances else None
            yield k, x, h, s, fejer

    def to_dict(self) -> dict:
        return _jsonable({
            "function": self.f.id,
            "set": self.box.to_dict(),
            "iterates": self.iterates,
            "values": self.values,
            "step_norms": self.step_norms,
            "fejer_distances": self.fejer_distances,
            "stop_reason": self.stop_reason,
            "diagnostic": self.diagnostic,
        })


class ProximalPointMethod:
    """Run ``x^{k+1} = prox_h(K, x^k)`` until a stop criterion fires.

    The loop aborts with ``prox_failure`` as soon as a step is multivalued,
    unbounded or not verifiably attained; it never selects among minimisers.

    Parameters
    ----------
    f : FunctionSpec
        Objective h.
    box : Box
        Feasible set K.
    cfg : PPAConfig
        Iteration parameters.
    solver : SolverConfig, optional
        Settings of every prox solve.
    writer : TraceWriter, optional
        If given and open, every iterate is streamed to it.

    Raises
    ------
    InfeasiblePointError
        If ``x0`` or ``known_min`` is outside ``set ∩ dom``.
    """

    def __init__(
            self,
            f: FunctionSpec,
            box: Box,
            cfg: PPAConfig,
            solver: Optional[SolverConfig] = None,
            writer: Optional[TraceWriter] = None
    ):
        self._f = f
        self._box = box
        self._cfg = cfg
        self._solver = solver or SolverConfig()
        self._writer = writer
        self._x0 = self._feasible(cfg.x0, "x0")
        self._anchor = self._feasible(cfg.known_min, "known_min") if cfg.known_min is not None else None
        if cfg.step_mode is StepMode.SUBLEVEL and f.dimension == 2:
            logger.debug("sublevel steps in 2-D use the box prox, whose value lies in the sublevel set")

    def _feasible(self, x: Tuple[float, ...], name: str) -> np.ndarray:
        xv = np.asarray(x, dtype=float)
        if xv.shape != (self._f.dimension,) or not self._box.contains(xv) or not np.isfinite(self._f.evaluate(xv)):
            raise InfeasiblePointError(f"{name}={x} is not in {self._box} ∩ dom {self._f.id}")
        return xv

    def step(self, x: np.ndarray) -> ProxResult:
        """One prox step from `x`."""
        level = None
        if self._cfg.step_mode is StepMode.SUBLEVEL and self._f.dimension == 1:
            level = self._f.evaluate(x)
        return prox(ProxQuery(self._f, self._box, x, self._cfg.gamma, level), self._solver)

    def run(self) -> PPATrace:
        cfg = self._cfg
        x = self._x0
        h = self._f.evaluate(x)
        iterates: List[Tuple[float, ...]] = [tuple(x.tolist())]
        values = [h]
        steps = [0.0]
        fejer = [float(np.linalg.norm(x - self._anchor))] if self._anchor is not None else []
        self._dump(0, iterates, values, steps, fejer)

        stop, diagnostic = StopReason.MAX_ITERS, ""
        for k in range(1, cfg.max_iters + 1):
            result = self.step(x)
            if (result.attained is not Attainment.VERIFIED) or result.multiplicity is Multiplicity.MULTIPLE:
                stop = StopReason.PROX_FAILURE
                diagnostic = (
                    f"prox at x^{k - 1}={tuple(x.tolist())} is {result.attained.value}/{result.multiplicity.value}: "
                    f"{list(result.argmin)}"
                )
                logger.warning("ppa on '%s' aborted: %s", self._f.id, diagnostic)
                break
            nxt = np.asarray(result.argmin[0])
            h_next = self._f.evaluate(nxt)
            step_norm = float(np.linalg.norm(nxt - x))
            decrease = h - h_next
            iterates.append(tuple(nxt.tolist()))
            values.append(h_next)
            steps.append(step_norm)
            if self._anchor is not None:
                fejer.append(float(np.linalg.norm(nxt - self._anchor)))
            self._dump(k, iterates, values, steps, fejer)
            x, h = nxt, h_next
            if step_norm <= cfg.step_tol:
                stop = StopReason.STEP_TOL
                break
            if 0 <= decrease <= cfg.value_tol:
                stop = StopReason.VALUE_TOL
                break

        logger.info("ppa on '%s' stopped after %d steps: %s", self._f.id, len(iterates) - 1, stop.value)
        return PPATrace(self._f, self._box, tuple(iterates), tuple(values), tuple(steps), tuple(fejer), stop, diagnostic)

    def _dump(self, k, iterates, values, steps, fejer):
        if self._writer is None:
            return
        self._writer._dump(TraceRowAdapter(k, iterates[k], values[k], steps[k], fejer[k] if fejer else None))


def run(
        f: FunctionSpec,
        box: Box,
        cfg: PPAConfig,
        solver: Optional[SolverConfig] = None,
        writer: Optional[TraceWriter] = None
) -> PPATrace:
    """Run the proximal point algorithm; see `ProximalPointMethod`."""
    return ProximalPointMethod(f, box, cfg, solver, writer).run()


def check_monotone(trace: PPATrace) -> CheckReport:
    """Check ``h(x^{k+1}) <= h(x^k)`` along the trace (within 1e-12, scaled)."""
    v = np.asarray(trace.values, dtype=float)
    if v.size < 2:
        return CheckReport("monotone", True, 0, np.inf)
    drop = v[:-1] - v[1:]
    bad = np.flatnonzero(drop < -MONOTONE_TOL * (1.0 + np.abs(v[:-1])))
    violator = (int(bad[0]) + 1, float(v[bad[0]]), float(v[bad[0] + 1])) if bad.size else None
    return CheckReport("monotone", bad.size == 0, int(drop.size), float(drop.min()), violator)


def check_fejer(trace: PPATrace, xbar: Point) -> CheckReport:
    """Check that ``|x^k - xbar|`` is non-increasing and emit the rate sequence.

    ``details["rate"]`` is ``k * (h(x^k) - h(xbar))``; its boundedness is the
    evidence for the ``O(1/k)`` convergence of the values.

    Raises
    ------
    InfeasiblePointError
        If `xbar` is outside ``set ∩ dom``.
    """
    xb = np.atleast_1d(np.asarray(xbar, dtype=float))
    if xb.shape != (trace.f.dimension,) or not trace.box.contains(xb) or not np.isfinite(trace.f.evaluate(xb)):
        raise InfeasiblePointError(f"xbar={xb} is not in {trace.box} ∩ dom {trace.f.id}")
    pts = np.asarray(trace.iterates, dtype=float)
    dist = np.linalg.norm(pts - xb, axis=1)
    h_star = trace.f.evaluate(xb)
    rate = np.arange(len(pts)) * (np.asarray(trace.values) - h_star)
    details = {"distances": dist, "rate": rate, "rate_bound": float(np.max(rate))}
    if dist.size < 2:
        return CheckReport("fejer", True, 0, np.inf, None, details)
    drop = dist[:-1] - dist[1:]
    bad = np.flatnonzero(drop < -MONOTONE_TOL * (1.0 + dist[:-1]))
    violator = (int(bad[0]) + 1, float(dist[bad[0]]), float(dist[bad[0] + 1])) if bad.size else None
    return CheckReport("fejer", bad.size == 0, int(drop.size), float(drop.min()), violator, details)
