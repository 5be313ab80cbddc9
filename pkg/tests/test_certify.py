import math

import numpy as np
import pytest

from proxcvx.catalog import Box, builtin
from proxcvx.certify import (
    AlphaInterval, alpha_interval, check_alpha, check_envelope_minimality, check_firm_nonexpansive,
    default_grids, sample_pairs, scaling_consistency,
)
from proxcvx.error import DivergentProxError, InfeasiblePointError, MultivaluedProxError
from proxcvx.prox_core import SolverConfig
from proxcvx.state import CertificateStatus


@pytest.fixture
def negquad():
    return builtin("negquad"), Box.interval(0.0, 1.0)


@pytest.fixture
def logaffine():
    f = builtin("logaffine")
    return f, f.domain


# =================================================================
# 1. Alpha interval
# =================================================================
def test_interval_helpers():
    """
    Interval rendering, membership and emptiness respect open and closed ends.
    """
    iv = AlphaInterval(0.0, 2.0, False, True)
    assert str(iv) == "(0, 2]"
    assert iv.contains(2.0) and not iv.contains(0.0) and not iv.contains(2.5)
    assert not iv.is_empty
    assert AlphaInterval(1.0, 1.0, True, False).is_empty


def test_negquad_interval_is_bounded_by_two(negquad):
    """
    The pair z=0, x=0 with prox point 1 binds the upper end of negquad's interval at 2.
    """
    cert = alpha_interval(*negquad)
    assert cert.status is CertificateStatus.CERTIFIED
    assert cert.interval.upper == pytest.approx(2.0, abs=1e-6), f"upper end should be 2, got {cert.interval}"
    assert cert.interval.upper_closed
    assert cert.interval.lower == 0.0 and not cert.interval.lower_closed
    assert cert.upper_binding.z == (0.0,)
    assert cert.upper_binding.x == (0.0,)
    assert cert.upper_binding.xbar == (1.0,)


def test_logaffine_interval_contains_known_values(logaffine):
    """
    logaffine is certified with an upper end of 5 + ln(21/11) from the pair z=2, x=2.
    """
    cert = alpha_interval(*logaffine)
    assert cert.certified
    assert cert.interval.contains(1.0) and cert.interval.contains(4.9)
    assert cert.interval.upper == pytest.approx(5.0 + math.log(21.0 / 11.0), abs=1e-3)
    data = cert.to_dict()
    assert data["alpha_interval"]["lower"] == 0.0
    assert data["alpha_interval"]["lower_closed"] is False


@pytest.mark.parametrize("name", ["halfsquare", "abs"])
def test_convex_functions_admit_alpha_one(name):
    """
    Convex functions are prox-convex with alpha=1.
    """
    cert = alpha_interval(builtin(name), Box.interval(-1.0, 1.0))
    assert cert.certified
    assert cert.interval.lower <= 1.0 + 1e-9
    assert cert.interval.upper >= 1.0 - 1e-9


def test_numeric_path_certifies_convex_function_near_its_minimiser():
    """
    Anchors a few 1e-5 away from the minimiser of halfsquare must not be
    mistaken for multivalued prox points by the numeric solver.
    """
    cert = alpha_interval(
        builtin("halfsquare"), Box.interval(-1.0, 1.0), zgrid=[2e-5, 4e-5, 6e-5],
        cfg=SolverConfig(use_closed_form=False),
    )
    assert cert.status is CertificateStatus.CERTIFIED, cert.diagnostic
    assert cert.interval.contains(1.0), f"alpha=1 should be admissible, got {cert.interval}"


def test_indicator_spike_is_not_certified():
    """
    The spike at 0 breaks lower semicontinuity, so no certificate is issued.
    """
    cert = alpha_interval(builtin("indicator_spike"), Box.interval(-1.0, 1.0))
    assert cert.status is not CertificateStatus.CERTIFIED
    assert cert.interval is None
    assert cert.diagnostic


def test_multivalued_prox_refutes():
    """
    A multivalued prox refutes prox-convexity before any inequality is tested.
    """
    cert = alpha_interval(builtin("negabs"), Box.interval(-1.0, 1.0), zgrid=[0.0])
    assert cert.status is CertificateStatus.REFUTED
    assert "multivalued" in cert.diagnostic
    assert cert.witness is not None


def test_divergent_prox_is_indeterminate():
    """
    An unbounded subproblem leaves the verdict open.
    """
    f = builtin("negcubic")
    cert = alpha_interval(f, Box.whole(), zgrid=[0.0], xgrid=np.linspace(-2.0, 2.0, 5))
    assert cert.status is CertificateStatus.INDETERMINATE
    assert "diverges" in cert.diagnostic


def test_recorded_rows_classify_every_pair(negquad):
    """
    With rows recorded, every (z, x) pair is classified and the upper rows reproduce the bound 2.
    """
    f, box = negquad
    cert = alpha_interval(f, box, zgrid=[0.0, 0.5], xgrid=np.linspace(0.0, 1.0, 5), record_rows=True)
    assert len(cert.rows) == 10
    assert {row["bound_type"] for row in cert.rows} <= {"lower", "upper", "vacuous", "infeasible"}
    upper_rows = [row for row in cert.rows if row["bound_type"] == "upper"]
    assert min(row["bound_value"] for row in upper_rows) == pytest.approx(2.0)


def test_default_grids_sizes(negquad):
    """
    1-D default grids are 33 anchors by 257 points.
    """
    zgrid, xgrid = default_grids(*negquad)
    assert zgrid.shape == (33,) and xgrid.shape == (257,)


# =================================================================
# 2. Direct alpha checks
# =================================================================
@pytest.mark.parametrize("alpha, passed", [(0.5, True), (1.5, True), (2.0, True), (3.0, False)])
def test_check_alpha(negquad, alpha, passed):
    """
    negquad on [0, 1] satisfies the inequality up to alpha=2 and fails beyond.
    """
    report = check_alpha(*negquad, alpha)
    assert report.passed is passed, f"alpha={alpha} should {'pass' if passed else 'fail'}"
    if not passed:
        assert report.witness is not None
        assert report.worst_slack < 0


def test_check_alpha_raises_on_divergence():
    """
    A single-alpha check cannot conclude when the prox diverges.
    """
    with pytest.raises(DivergentProxError):
        check_alpha(builtin("negcubic"), Box.whole(), 1.0, zgrid=[0.0], xgrid=[0.0, 1.0])


def test_scaling_consistency(negquad):
    """
    The prox of h with parameter 1/alpha matches the alpha-scaled inequality.
    """
    report = scaling_consistency(*negquad, 2.0)
    assert report.passed
    assert report.details["alpha"] == 2.0


def test_envelope_minimality(negquad):
    """
    The prox point minimises the envelope objective on samples.
    """
    assert check_envelope_minimality(*negquad, 1.0).passed


# =================================================================
# 3. Firm nonexpansiveness
# =================================================================
def test_sample_pairs_are_deterministic(logaffine):
    """
    Pair sampling is reproducible for a fixed seed and stays in the set.
    """
    a = sample_pairs(*logaffine, count=50, pool_size=8, seed=3)
    b = sample_pairs(*logaffine, count=50, pool_size=8, seed=3)
    assert len(a) == 50
    assert all(np.array_equal(p[0], q[0]) and np.array_equal(p[1], q[1]) for p, q in zip(a, b))
    assert all(1.0 <= p[0][0] <= 2.0 for p in a)


@pytest.mark.parametrize("name, box", [
    ("negquad", Box.interval(0.0, 1.0)),
    ("halfsquare", Box.interval(-5.0, 5.0)),
    ("abs", Box.interval(-3.0, 3.0)),
    ("quad2d", Box((0.0, -10.0), (2.0, 10.0))),
])
def test_prox_is_firmly_nonexpansive(name, box):
    """
    The prox of these functions is firmly nonexpansive on sampled pairs.
    """
    f = builtin(name)
    report = check_firm_nonexpansive(f, box, sample_pairs(f, box, count=200, pool_size=16))
    assert report.passed
    assert report.details["fne_worst_slack"] >= -1e-9, f"{name}: firm nonexpansiveness violated"


def test_fne_rejects_pairs_outside_set(negquad):
    """
    Pairs must lie in the set.
    """
    with pytest.raises(InfeasiblePointError):
        check_firm_nonexpansive(*negquad, [((0.5,), (2.0,))])


def test_fne_requires_single_valued_prox():
    """
    Firm nonexpansiveness is undefined for a multivalued prox.
    """
    with pytest.raises(MultivaluedProxError):
        check_firm_nonexpansive(builtin("negabs"), Box.interval(-1.0, 1.0), [((0.0,), (0.5,))])
