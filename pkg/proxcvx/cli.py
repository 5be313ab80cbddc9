import argparse
import logging
import sys
from typing import Optional, Sequence, Tuple

from . import __version__
from .catalog import Box, FunctionSpec
from .certify import alpha_interval, check_alpha
from .config import RunConfig
from .diagnostics import (
    coercivity_probe, estimate_strong_qcx_modulus, identity_selftest, lattice_triples, quasiconvexity_probe,
)
from .error import DivergentProxError, ProxCvxError, ProxError
from .ppa import PPAConfig, run
from .prox_core import ProxQuery, moreau, moreau_gradient, prox
from .state import Attainment, QcxKind, StepMode, StopReason, SubdiffKind
from .subdiff import charmin_check, in_subdiff, strongly_G_check
from .suite import run_suite
from .writer import to_json_text, write_trace_csv, write_witness_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_ERROR = 2

_QCX_KINDS = {
    "quasiconvex": QcxKind.QUASICONVEX,
    "semistrict": QcxKind.SEMISTRICT,
    "strict": QcxKind.STRICT,
    "strong": QcxKind.STRONG,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="proxcvx", description="Prox-convexity toolkit for piecewise functions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--fn", dest="function", help="builtin function, e.g. negquad or staircase:n=4")
        p.add_argument("--fn-json", dest="function_json", help="inline JSON spec or path to a JSON file")
        p.add_argument("--set", help="box, e.g. 0,1 or 0,2:-inf,inf (defaults to the domain)")
        p.add_argument("--grid", type=int, help="grid points per coordinate")
        p.add_argument("--output", choices=("json", "csv"), help="report format (default json)")
        p.add_argument("--output-path", help="write the report here instead of stdout")
        p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")

    p = sub.add_parser("prox", help="solve one prox subproblem")
    common(p)
    p.add_argument("--z", required=True)
    p.add_argument("--gamma", type=float)
    p.add_argument("--sublevel", action="store_true", help="restrict to {h <= h(z)} (1-D)")

    p = sub.add_parser("moreau", help="Moreau envelope value and gradient")
    common(p)
    p.add_argument("--z", required=True)
    p.add_argument("--gamma", type=float)

    p = sub.add_parser("certify", help="certify prox-convexity and its alpha interval")
    common(p)
    p.add_argument("--alpha", type=float, help="check a single alpha instead of computing the interval")

    p = sub.add_parser("subdiff", help="subdifferential membership and minimality checks")
    common(p)
    p.add_argument("--kind", help="convex, gutierrez, plastria, charmin (default) or strongly-g")
    p.add_argument("--x")
    p.add_argument("--xi")
    p.add_argument("--beta", type=float)

    p = sub.add_parser("ppa", help="run the proximal point algorithm")
    common(p)
    p.add_argument("--x0", required=True)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--gamma", type=float, help="prox parameter of every step (default 1)")
    p.add_argument("--sublevel", action="store_true", help="step on the sublevel set of the current iterate")

    p = sub.add_parser("probe", help="quasiconvexity, coercivity and identity probes")
    common(p)
    p.add_argument("--kind", help=", ".join(("quasiconvex", "semistrict", "strict", "strong", "coercivity",
                                              "identities", "modulus")))
    p.add_argument("--beta", type=float)

    p = sub.add_parser("suite", help="run the acceptance suite")
    p.add_argument("--filter", help="criterion id, group or name substring")
    p.add_argument("--grid", type=int)
    p.add_argument("--output", choices=("json", "csv"))
    p.add_argument("--output-path")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


# ============================================================
# Commands
# ============================================================
def _setup(cfg: RunConfig) -> Tuple[FunctionSpec, Box]:
    f = cfg.resolve_function()
    return f, cfg.resolve_set(f)


def _cmd_prox(cfg: RunConfig):
    f, box = _setup(cfg)
    level = f.evaluate(cfg.z) if cfg.sublevel else None
    result = prox(ProxQuery(f, box, cfg.z, cfg.gamma, level), cfg.solver_config())
    report = {"function": f.id, "set": box.to_dict(), "z": cfg.z, "gamma": cfg.gamma, **result.to_dict()}
    return report, result.attained is Attainment.DIVERGENT


def _cmd_moreau(cfg: RunConfig):
    f, box = _setup(cfg)
    solver = cfg.solver_config()
    q = ProxQuery(f, box, cfg.z, cfg.gamma)
    report = {"function": f.id, "set": box.to_dict(), "z": cfg.z, "gamma": cfg.gamma}
    try:
        report["value"] = moreau(q, solver)
    except DivergentProxError:
        report["value"] = float("-inf")
        report["attained"] = Attainment.DIVERGENT
        return report, True
    try:
        report["gradient"] = moreau_gradient(f, box, cfg.z, 1.0 / cfg.gamma, solver)
    except ProxError as exc:
        report["gradient"] = None
        report["diagnostic"] = str(exc)
    return report, False


def _cmd_certify(cfg: RunConfig):
    f, box = _setup(cfg)
    solver = cfg.solver_config()
    if cfg.alpha is not None:
        check = check_alpha(f, box, cfg.alpha, cfg=solver)
        return {"function": f.id, "set": box.to_dict(), **check.to_dict()}, not check.passed
    cert = alpha_interval(f, box, cfg=solver, record_rows=cfg.output == "csv")
    if cfg.output == "csv":
        write_witness_csv(cert, cfg.output_path or sys.stdout)
        return None, not cert.certified
    return {"function": f.id, "set": box.to_dict(), **cert.to_dict()}, not cert.certified


def _cmd_subdiff(cfg: RunConfig):
    f, box = _setup(cfg)
    kind = cfg.kind or "charmin"
    if kind == "strongly-g":
        report = strongly_G_check(f, box, cfg=cfg.solver_config(), beta=cfg.beta)
        return {"function": f.id, "kind": kind, **report.to_dict()}, not report.passed
    if kind == "charmin":
        report = charmin_check(f, box, cfg.x)
        return {"function": f.id, "kind": kind, **report.to_dict()}, not report.agree
    report = in_subdiff(SubdiffKind(kind), f, box, cfg.x, cfg.xi)
    return {"function": f.id, "x": cfg.x, "xi": cfg.xi, **report.to_dict()}, not report.is_member


def _cmd_ppa(cfg: RunConfig):
    f, box = _setup(cfg)
    mode = StepMode.SUBLEVEL if cfg.sublevel else StepMode.BOX
    ppa_cfg = PPAConfig(cfg.x0, max_iters=cfg.max_iters, gamma=cfg.gamma, step_mode=mode)
    trace = run(f, box, ppa_cfg, cfg.solver_config())
    failed = trace.stop_reason is StopReason.PROX_FAILURE
    if cfg.output == "csv":
        write_trace_csv(trace, cfg.output_path or sys.stdout)
        return None, failed
    return trace.to_dict(), failed


def _cmd_probe(cfg: RunConfig):
    kind = cfg.kind or "quasiconvex"
    if kind == "identities":
        report = identity_selftest()
        return {"kind": kind, **report.to_dict()}, not report.consistent
    f, box = _setup(cfg)
    if kind == "coercivity":
        return {"function": f.id, "kind": kind, **coercivity_probe(f).to_dict()}, False
    triples = lattice_triples(f, box, points=cfg.grid)
    if kind == "modulus":
        return {"function": f.id, "kind": kind, "beta_estimate": estimate_strong_qcx_modulus(f, box, triples)}, False
    report = quasiconvexity_probe(_QCX_KINDS[kind], f, box, triples, cfg.beta)
    return {"function": f.id, "set": box.to_dict(), **report.to_dict()}, not report.consistent


def _cmd_suite(cfg: RunConfig):
    report = run_suite(cfg.filter, cfg.grid, cfg.threads)
    print(report.table(), file=sys.stderr)
    return report.to_dict(), not report.passed


_COMMANDS = {
    "prox": _cmd_prox,
    "moreau": _cmd_moreau,
    "certify": _cmd_certify,
    "subdiff": _cmd_subdiff,
    "ppa": _cmd_ppa,
    "probe": _cmd_probe,
    "suite": _cmd_suite,
}


def _emit(report: dict, path: Optional[str]):
    text = to_json_text(report)
    if path:
        with open(path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``proxcvx`` command.

    Returns 0 on success (certified, passed, member, consistent), 1 when the
    verdict is negative (refuted, divergent, prox failure, violated) and 2 on
    usage, configuration or solver errors.
    """
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    values = {k: v for k, v in vars(args).items() if k != "verbose"}
    values["sublevel"] = values.get("sublevel") or None
    try:
        cfg = RunConfig.load(**values)
        report, negative = _COMMANDS[cfg.command](cfg)
    except ProxCvxError as exc:
        print(f"proxcvx: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if report is not None:
        _emit(report, cfg.output_path)
    return EXIT_VERDICT if negative else EXIT_OK
