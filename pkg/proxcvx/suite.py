"""Acceptance suite: every worked example reproduced with measured and expected values."""
import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional

import numpy as np

from .catalog import INF, Box, builtin
from .certify import alpha_interval, check_alpha, check_firm_nonexpansive, sample_pairs
from .diagnostics import lattice_triples, quasiconvexity_probe
from .error import ProxCvxError
from .ppa import PPAConfig, check_fejer, check_monotone, run
from .prox_core import ProxQuery, SolverConfig, minimize, moreau, moreau_gradient, prox
from .report import _jsonable
from .state import Attainment, CertificateStatus, QcxKind
from .subdiff import strongly_G_check

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CriterionResult:
    """One row of the suite table."""

    id: int
    name: str
    group: str
    measured: object
    expected: object
    provenance: str
    passed: bool
    note: str = ""
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return _jsonable({
            "id": self.id, "name": self.name, "group": self.group,
            "measured": self.measured, "expected": self.expected,
            "provenance": self.provenance, "passed": self.passed,
            "note": self.note, "seconds": round(self.seconds, 3),
        })


@dataclass(frozen=True)
class SuiteReport:
    results: List[CriterionResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "criteria": [r.to_dict() for r in self.results],
        }

    def table(self) -> str:
        lines = [f"{'id':>3}  {'group':<9} {'name':<28} {'result':<6} measured / expected"]
        for r in self.results:
            verdict = "PASS" if r.passed else "FAIL"
            lines.append(f"{r.id:>3}  {r.group:<9} {r.name:<28} {verdict:<6} {r.measured} / {r.expected} [{r.provenance}]")
        return "\n".join(lines)


@dataclass(frozen=True)
class _Criterion:
    id: int
    name: str
    group: str
    provenance: str
    func: Callable[[SolverConfig], tuple]


_CRITERIA: List[_Criterion] = []


def criterion(id: int, name: str, group: str, provenance: str):
    """Register a suite criterion.

    The decorated function receives the solver configuration and returns
    ``(passed, measured, expected, note)``.
    """
    def _decorator(func):
        _CRITERIA.append(_Criterion(id, name, group, provenance, func))
        return func
    return _decorator


def criteria() -> List[_Criterion]:
    return sorted(_CRITERIA, key=lambda c: c.id)


def _matches(c: _Criterion, pattern: Optional[str]) -> bool:
    if not pattern:
        return True
    pattern = pattern.lower()
    return pattern == str(c.id) or pattern == c.group or pattern in c.name


def run_suite(filter: Optional[str] = None, grid: Optional[int] = None, threads: int = 0) -> SuiteReport:
    """Run every criterion whose id, group or name matches `filter`.

    A criterion that raises is recorded as failed with the exception text.
    """
    cfg = SolverConfig(threads=threads)
    if grid is not None:
        cfg = cfg.with_points(grid)
    results = []
    for c in criteria():
        if not _matches(c, filter):
            continue
        start = time.perf_counter()
        try:
            passed, measured, expected, note = c.func(cfg)
        except ProxCvxError as exc:
            passed, measured, expected, note = False, f"error: {exc}", "-", type(exc).__name__
        elapsed = time.perf_counter() - start
        logger.info("criterion %d %s: %s (%.2fs)", c.id, c.name, "pass" if passed else "FAIL", elapsed)
        results.append(CriterionResult(c.id, c.name, c.group, measured, expected, c.provenance,
                                       bool(passed), note, elapsed))
    return SuiteReport(results)


# ============================================================
# Criteria
# ============================================================
UNIT = Box.interval(0.0, 1.0)


@criterion(1, "negquad_prox", "prox", "REFERENCE")
def _negquad_prox(cfg):
    f = builtin("negquad")
    numeric = replace(cfg, use_closed_form=False)
    worst_numeric = worst_closed = 0.0
    for z in np.linspace(0.0, 1.0, 33):
        q = ProxQuery(f, UNIT, z)
        worst_numeric = max(worst_numeric, abs(prox(q, numeric).point[0] - 1.0))
        worst_closed = max(worst_closed, abs(prox(q, cfg).point[0] - 1.0))
    passed = worst_numeric <= 1e-6 and worst_closed <= 1e-12
    return passed, {"numeric_dev": worst_numeric, "closed_dev": worst_closed}, "argmin 1 (numeric ±1e-6, closed form exact)", ""


@criterion(2, "scaled_prox", "prox", "REFERENCE")
def _scaled_prox(cfg):
    f = builtin("negquad")
    x = prox(ProxQuery(f, UNIT, 0.0, gamma=0.1), cfg).point[0]
    numeric = prox(ProxQuery(f, UNIT, 0.0, gamma=0.1), replace(cfg, use_closed_form=False)).point[0]
    passed = abs(x - 0.125) <= 1e-8 and abs(numeric - 0.125) <= 1e-8
    return passed, {"closed": x, "numeric": numeric}, 0.125, ""


@criterion(3, "negquad_interval", "certify", "DERIVED")
def _negquad_interval(cfg):
    cert = alpha_interval(builtin("negquad"), UNIT, cfg=cfg)
    upper = cert.interval.upper if cert.interval else None
    binding = cert.upper_binding
    passed = (
        cert.status is CertificateStatus.CERTIFIED
        and abs(upper - 2.0) <= 1e-6
        and binding is not None and binding.z == (0.0,) and binding.x == (0.0,)
    )
    note = "the pair z=0, x=0 bounds alpha by 2, so not every alpha > 0 is admissible"
    return passed, {"status": cert.status.value, "upper": upper}, {"upper": 2.0, "binding": "z=0, x=0"}, note


@criterion(4, "logaffine_interval", "certify", "REFERENCE+DERIVED")
def _logaffine_interval(cfg):
    cert = alpha_interval(builtin("logaffine"), Box.interval(1.0, 2.0), cfg=cfg)
    expected = 5.0 + math.log(21.0 / 11.0)
    if cert.interval is None:
        return False, {"status": cert.status.value}, expected, cert.diagnostic
    passed = (
        cert.interval.contains(1.0) and cert.interval.contains(4.9)
        and abs(cert.interval.upper - expected) <= 1e-3
    )
    note = "the range (0, 5) is a sufficient subset of the certified interval"
    return passed, {"interval": str(cert.interval)}, {"contains": [1.0, 4.9], "upper": expected}, note


@criterion(5, "staircase_prox", "prox", "REFERENCE")
def _staircase_prox(cfg):
    worst = 0.0
    for n in (3, 4, 5):
        f = builtin("staircase", n=n)
        box = Box.interval(1.0, float(n))
        for z in np.linspace(1.0, float(n), 17):
            worst = max(worst, abs(prox(ProxQuery(f, box, z), cfg).point[0] - n))
    return worst <= 1e-8, {"max_dev": worst}, "argmin n for n in 3, 4, 5", ""


@criterion(6, "quad2d_end_to_end", "ppa", "REFERENCE")
def _quad2d(cfg):
    f = builtin("quad2d")
    box = Box((0.0, -INF), (2.0, INF))
    numeric = replace(cfg, use_closed_form=False)
    worst = 0.0
    for z in ((-3.0, 4.0), (-2.5, -1.0), (1.0, -2.0), (0.5, 9.0)):
        expected = np.array([0.0 if z[0] <= -2 else 2.0, z[1] / 3.0])
        worst = max(worst, float(np.max(np.abs(prox(ProxQuery(f, box, z), numeric).point - expected))))
    trace = run(f, box, PPAConfig((0.5, 9.0)), cfg)
    pts = np.asarray(trace.iterates)
    k = np.arange(len(pts))
    law = max(float(np.max(np.abs(pts[1:, 0] - 2.0))), float(np.max(np.abs(pts[:, 1] - 9.0 / 3.0 ** k))))
    limit = float(np.linalg.norm(trace.final - np.array([2.0, 0.0])))
    passed = worst <= 1e-8 and law <= 1e-9 and limit <= 1e-5
    return passed, {"prox_dev": worst, "law_dev": law, "limit_dist": limit}, "x^k = (2, 9/3^k), limit (2, 0)", ""


@criterion(7, "convex_baseline", "certify", "REFERENCE")
def _convex_baseline(cfg):
    measured = {}
    passed = True
    for name in ("halfsquare", "abs"):
        cert = alpha_interval(builtin(name), Box.interval(-1.0, 1.0), cfg=cfg)
        ok = (
            cert.status is CertificateStatus.CERTIFIED
            and cert.interval.lower <= 1.0 + 1e-9 and cert.interval.upper >= 1.0 - 1e-9
        )
        measured[name] = str(cert.interval) if cert.interval else cert.status.value
        passed = passed and ok
    note = "convex functions certify with alpha = 1; the interval is bounded above on a bounded box"
    return passed, measured, "1 in interval", note


@criterion(8, "firm_nonexpansive", "fne", "REFERENCE")
def _firm_nonexpansive(cfg):
    cases = (
        ("negquad", {}, UNIT),
        ("logaffine", {}, Box.interval(1.0, 2.0)),
        ("staircase", {"n": 3}, Box.interval(1.0, 3.0)),
        ("quad2d", {}, Box((0.0, -INF), (2.0, INF))),
    )
    measured = {}
    passed = True
    for name, params, box in cases:
        f = builtin(name, params)
        report = check_firm_nonexpansive(f, box, sample_pairs(f, box, count=1000, pool_size=48, seed=1), cfg)
        measured[f.id] = report.worst_slack
        passed = passed and report.passed
    return passed, measured, "worst slack >= -1e-9", ""


@criterion(9, "moreau_gradient", "moreau", "REFERENCE")
def _moreau_gradient(cfg):
    cases = (("negquad", UNIT, 1.0), ("negquad", UNIT, 2.0), ("logaffine", Box.interval(1.0, 2.0), 1.0))
    worst_fd = 0.0
    worst_lip = 0.0
    for name, box, alpha in cases:
        f = builtin(name)
        lo, hi = box.lower[0], box.upper[0]
        zs = np.linspace(lo, hi, 22)[1:-1]
        grads = []
        for z in zs:
            g = float(moreau_gradient(f, box, z, alpha, cfg)[0])
            step = 1e-5 * (1.0 + abs(z))
            up = moreau(ProxQuery(f, box, z + step, gamma=1.0 / alpha), cfg)
            down = moreau(ProxQuery(f, box, z - step, gamma=1.0 / alpha), cfg)
            fd = (up - down) / (2.0 * step)
            worst_fd = max(worst_fd, abs(fd - g) / (1.0 + abs(g)))
            grads.append(g)
        grads = np.asarray(grads)
        dz = np.abs(zs[:, None] - zs[None, :])
        dg = np.abs(grads[:, None] - grads[None, :])
        off = dz > 0
        worst_lip = max(worst_lip, float(np.max(dg[off] / (alpha * dz[off]))))
    passed = worst_fd <= 1e-5 and worst_lip <= 1.0 + 1e-8
    return passed, {"fd_rel_err": worst_fd, "lipschitz_ratio": worst_lip}, {"fd_rel_err": "<= 1e-5", "lipschitz_ratio": "<= 1"}, ""


@criterion(10, "negative_controls", "controls", "REFERENCE")
def _negative_controls(cfg):
    divergent = prox(ProxQuery(builtin("negcubic"), Box.whole(), 0.0), cfg).attained
    spike = alpha_interval(builtin("indicator_spike"), Box.interval(-1.0, 1.0), cfg=cfg)
    f = builtin("cubic_shifted", n=3)
    box = Box.interval(-3.0, 10.0)
    triples = lattice_triples(f, box) + lattice_triples(f, Box.interval(-0.5, 0.5), points=41)
    qcx = quasiconvexity_probe(QcxKind.QUASICONVEX, f, box, triples)
    strong = [quasiconvexity_probe(QcxKind.STRONG, f, box, triples, beta).verdict.value for beta in (0.1, 1.0)]
    passed = (
        divergent is Attainment.DIVERGENT
        and spike.status is not CertificateStatus.CERTIFIED
        and qcx.consistent and all(v == "violated" for v in strong)
    )
    measured = {
        "negcubic": divergent.value, "indicator_spike": spike.status.value,
        "cubic_qcx": qcx.verdict.value, "cubic_strong": strong,
    }
    expected = {"negcubic": "divergent", "indicator_spike": "not certified",
                "cubic_qcx": "consistent", "cubic_strong": ["violated", "violated"]}
    return passed, measured, expected, ""


_PPA_CASES = (
    ("negquad", {}, UNIT, (0.0,)),
    ("logaffine", {}, Box.interval(1.0, 2.0), (2.0,)),
    ("staircase", {"n": 3}, Box.interval(1.0, 3.0), (1.0,)),
    ("quad2d", {}, Box((0.0, -INF), (2.0, INF)), (0.5, 9.0)),
    ("halfsquare", {}, Box.whole(), (1.0,)),
    ("abs", {}, Box.interval(-1.0, 1.0), (1.0,)),
)


@criterion(11, "ppa_monotone_fejer", "ppa", "REFERENCE")
def _ppa_monotone_fejer(cfg):
    measured = {}
    passed = True
    for name, params, box, x0 in _PPA_CASES:
        f = builtin(name, params)
        xbar = minimize(f, box, cfg).point
        trace = run(f, box, PPAConfig(x0, known_min=tuple(xbar)), cfg)
        mono = check_monotone(trace)
        fejer = check_fejer(trace, xbar)
        rate = fejer.details["rate"]
        bounded = bool(np.all(np.isfinite(rate)) and rate[-1] <= np.max(rate[: len(rate) // 2 + 1]) + 1e-9)
        ok = bool(mono.passed and fejer.passed and bounded)
        measured[f.id] = {"steps": len(trace) - 1, "rate_bound": fejer.details["rate_bound"], "ok": ok}
        passed = passed and ok
    return passed, measured, "monotone values and distances, bounded k*(h(x^k)-h*)", ""


@criterion(12, "strongly_g_pipeline", "subdiff", "REFERENCE")
def _strongly_g(cfg):
    f = builtin("negquad")
    report = strongly_G_check(f, UNIT, cfg=cfg, beta=1.0)
    half = check_alpha(f, UNIT, 0.5, cfg=cfg)
    passed = report.passed and half.passed
    measured = {"membership": report.membership_passed, "strong": report.strong.verdict.value, "alpha_half": half.passed}
    return passed, measured, {"membership": True, "strong": "consistent", "alpha_half": True}, ""
