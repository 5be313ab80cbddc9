import numpy as np
import pytest

from proxcvx.catalog import Box, builtin
from proxcvx.error import DimensionMismatchError, InfeasiblePointError
from proxcvx.state import Membership, SubdiffKind
from proxcvx.subdiff import charmin_check, in_subdiff, strong_qcx_consequence, strongly_G_check


@pytest.fixture
def halfsquare():
    return builtin("halfsquare"), Box.whole()


# =================================================================
# 1. Membership oracles
# =================================================================
@pytest.mark.parametrize("xi, verdict", [
    (1.0, Membership.MEMBER),
    (2.0, Membership.NON_MEMBER),
    (0.0, Membership.NON_MEMBER),
])
def test_convex_subdifferential_of_halfsquare(halfsquare, xi, verdict):
    """
    At x=1 only the gradient 1 is a convex subgradient of halfsquare.
    """
    report = in_subdiff(SubdiffKind.CONVEX, *halfsquare, 1.0, xi)
    assert report.verdict is verdict, f"xi={xi} should be {verdict.value}"
    if verdict is Membership.NON_MEMBER:
        assert report.violator is not None
        assert report.worst_slack < 0


def test_gutierrez_is_larger_than_convex(halfsquare):
    """
    Gutierrez subgradients only need to work on the sublevel set.
    """
    # at x = 1 every xi >= 1 works on the sublevel set [-1, 1]
    assert in_subdiff(SubdiffKind.GUTIERREZ, *halfsquare, 1.0, 5.0).is_member
    assert not in_subdiff(SubdiffKind.CONVEX, *halfsquare, 1.0, 5.0).is_member
    assert not in_subdiff(SubdiffKind.GUTIERREZ, *halfsquare, 1.0, -1.0).is_member


def test_plastria_at_minimiser_is_everything(halfsquare):
    """
    The strict sublevel set at a minimiser is empty, so any xi belongs.
    """
    report = in_subdiff("plastria", *halfsquare, 0.0, 42.0)
    assert report.is_member
    assert report.samples_checked == 0


def test_membership_requires_feasible_point():
    """
    x must lie in set ∩ dom.
    """
    with pytest.raises(InfeasiblePointError):
        in_subdiff(SubdiffKind.CONVEX, builtin("negquad"), Box.interval(0.0, 1.0), 2.0, 0.0)


def test_custom_ygrid_is_used(halfsquare):
    """
    An explicit sample grid replaces the default one.
    """
    report = in_subdiff(SubdiffKind.CONVEX, *halfsquare, 1.0, 2.0, ygrid=np.array([1.0, 3.0]))
    assert report.is_member
    assert report.samples_checked == 2


@pytest.mark.parametrize("xi", [-100.0, -1.0, 0.0, 3.5, 1e3])
def test_negquad_gutierrez_at_right_end_is_everything(xi):
    """
    The sublevel set of negquad at x=1 is {1}, so every xi is a Gutierrez subgradient.
    """
    report = in_subdiff(SubdiffKind.GUTIERREZ, builtin("negquad"), Box.interval(0.0, 1.0), 1.0, xi)
    assert report.is_member, f"xi={xi} should belong to the Gutierrez subdifferential at 1"


def test_halfsquare_convex_violator_is_right_end(halfsquare):
    """
    h(2) = 2 lies below h(1) + 3 * (2 - 1) = 3.5, so xi=3 fails at y=2.
    """
    report = in_subdiff(SubdiffKind.CONVEX, *halfsquare, 1.0, 3.0, ygrid=np.linspace(-2.0, 2.0, 81))
    assert report.verdict is Membership.NON_MEMBER
    assert report.violator[0] == pytest.approx(2.0)
    assert report.worst_slack == pytest.approx(-1.5)


def test_xi_of_wrong_dimension_is_rejected():
    """
    xi must have one entry per coordinate.
    """
    f = builtin("quad2d")
    with pytest.raises(DimensionMismatchError, match="xi"):
        in_subdiff(SubdiffKind.CONVEX, f, f.domain, (1.0, 0.0), 1.0)


_NESTING_CASES = [
    ("halfsquare", {}, Box.whole(), np.linspace(-2.0, 2.0, 81), (-1.5, 0.5, 1.0)),
    ("negquad", {}, Box.interval(0.0, 1.0), np.linspace(0.0, 1.0, 41), (0.0, 0.5, 1.0)),
    ("staircase", {"n": 3}, Box.interval(1.0, 3.0), np.linspace(1.0, 3.0, 41), (1.0, 2.0, 2.5)),
    ("abs", {}, Box.interval(-1.0, 1.0), np.linspace(-1.0, 1.0, 41), (-0.5, 0.0, 0.75)),
    ("logaffine", {}, Box.interval(1.0, 2.0), np.linspace(1.0, 2.0, 41), (1.0, 1.5, 2.0)),
]


@pytest.mark.parametrize("name, params, box, ygrid, xs", _NESTING_CASES)
def test_subdifferentials_are_nested(name, params, box, ygrid, xs):
    """
    On a shared sample, convex membership implies Gutierrez membership,
    which implies Plastria membership.
    """
    f = builtin(name, params)
    for x in xs:
        for xi in (-3.0, -1.0, 0.0, 1.0, 3.0):
            convex, gutierrez, plastria = (
                in_subdiff(kind, f, box, x, xi, ygrid=ygrid).is_member
                for kind in (SubdiffKind.CONVEX, SubdiffKind.GUTIERREZ, SubdiffKind.PLASTRIA)
            )
            assert not convex or gutierrez, f"{name}: convex member but not Gutierrez at x={x}, xi={xi}"
            assert not gutierrez or plastria, f"{name}: Gutierrez member but not Plastria at x={x}, xi={xi}"


@pytest.mark.parametrize("name, box, ygrid, xs, xis", [
    ("negquad", Box.interval(0.0, 1.0), np.linspace(0.0, 1.0, 41), (0.0, 0.25, 0.5, 1.0), (-4.0, -3.0, -1.0, 0.0, 2.0)),
    ("halfsquare", Box.whole(), np.linspace(-2.0, 2.0, 81), (0.5, 1.0, -1.5), (-2.0, -0.5, 0.0, 0.5, 1.0, 2.0)),
])
def test_strict_and_plain_sublevel_verdicts_agree(name, box, ygrid, xs, xis):
    """
    For lsc strongly quasiconvex functions the Gutierrez and Plastria
    subdifferentials coincide; the sampled verdicts must agree.
    """
    f = builtin(name)
    for x in xs:
        for xi in xis:
            gutierrez = in_subdiff(SubdiffKind.GUTIERREZ, f, box, x, xi, ygrid=ygrid)
            plastria = in_subdiff(SubdiffKind.PLASTRIA, f, box, x, xi, ygrid=ygrid)
            assert gutierrez.verdict is plastria.verdict, f"{name}: verdicts differ at x={x}, xi={xi}"


# =================================================================
# 2. Minimality characterisation
# =================================================================
def test_charmin_at_minimiser(halfsquare):
    """
    At a minimiser every minimality statement holds.
    """
    report = charmin_check(*halfsquare, 0.0)
    assert report.agree
    assert all(report.statements.values())


def test_charmin_away_from_minimiser(halfsquare):
    """
    Away from a minimiser the equivalent statements fail together.
    """
    report = charmin_check(*halfsquare, 1.0)
    assert report.agree
    assert not report.statements["minimizes"]
    assert not report.statements["zero_in_gutierrez"]
    assert not report.statements["zero_in_plastria"]
    assert not report.statements["probes_in_gutierrez"]


# =================================================================
# 3. Strong G-subdifferentiability
# =================================================================
def test_negquad_is_strongly_G_subdifferentiable():
    """
    negquad passes both the membership and the strong part with beta=1.
    """
    report = strongly_G_check(builtin("negquad"), Box.interval(0.0, 1.0), beta=1.0)
    assert report.passed
    assert report.membership_passed
    assert report.strong.consistent
    assert report.z_samples == 33


def test_cubic_fails_strong_part():
    """
    x^3 is not strongly quasiconvex around 0.
    """
    f = builtin("cubic_shifted", n=3)
    box = Box.interval(-0.5, 0.5)
    report = strongly_G_check(f, box, zgrid=np.linspace(-0.5, 0.5, 5), beta=1.0)
    assert not report.strong.consistent
    assert not report.passed


def test_strong_qcx_consequence():
    """
    The quadratic decay bound holds for beta=1 and fails for a too small beta.
    """
    report = strong_qcx_consequence(builtin("halfsquare"), 1.0, 1.0, 1.0, 1.0, box=Box.interval(-1.0, 1.0))
    assert report.passed
    bad = strong_qcx_consequence(builtin("halfsquare"), 1.0, 1.0, 1.0, 0.1, box=Box.interval(-1.0, 1.0))
    assert not bad.passed
