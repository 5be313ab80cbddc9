import math

import numpy as np
import pytest

from proxcvx.catalog import Box, builtin
from proxcvx.diagnostics import (
    Triples, coercivity_probe, estimate_strong_qcx_modulus, identity_selftest, lattice_triples,
    quasiconvexity_probe, random_triples,
)
from proxcvx.state import Coercivity, ProbeVerdict, QcxKind


# =================================================================
# 1. Triples
# =================================================================
def test_lattice_triples_cover_ordered_pairs():
    """
    Lattice triples use every ordered pair of distinct points with every lambda.
    """
    t = lattice_triples(builtin("negquad"), Box.interval(0.0, 1.0), points=3, lambdas=2)
    assert len(t) == 3 * 2 * 2
    assert not np.any(np.all(t.x == t.y, axis=1))
    assert set(t.lam.tolist()) == {0.0, 1.0}


def test_triples_concatenate():
    """
    Triples from two samplers can be joined.
    """
    f = builtin("negquad")
    a = lattice_triples(f, Box.interval(0.0, 1.0), points=3, lambdas=2)
    both = a + a
    assert isinstance(both, Triples)
    assert len(both) == 2 * len(a)
    np.testing.assert_array_equal(both.midpoints()[: len(a)], a.midpoints())


def test_random_triples_stay_in_domain():
    """
    Random triples are drawn from set ∩ dom only.
    """
    f = builtin("cubic_shifted", n=3)
    t = random_triples(f, Box.interval(-10.0, 10.0), count=200, seed=7)
    assert len(t) > 0
    assert np.all(t.x >= -3.0) and np.all(t.y >= -3.0)
    assert np.all((t.lam >= 0.0) & (t.lam <= 1.0))


# =================================================================
# 2. Quasiconvexity probes
# =================================================================
def _probe(kind, name, box, beta=1.0, **params):
    f = builtin(name, params)
    return quasiconvexity_probe(kind, f, box, lattice_triples(f, box), beta)


@pytest.mark.parametrize("kind, name, box, verdict", [
    (QcxKind.QUASICONVEX, "cubic_shifted", Box.interval(-3.0, 3.0), ProbeVerdict.CONSISTENT),
    (QcxKind.QUASICONVEX, "minabs", Box.whole(), ProbeVerdict.CONSISTENT),
    (QcxKind.SEMISTRICT, "minabs", Box.whole(), ProbeVerdict.VIOLATED),
    (QcxKind.QUASICONVEX, "indicator_spike", Box.interval(-1.0, 1.0), ProbeVerdict.VIOLATED),
    (QcxKind.SEMISTRICT, "indicator_spike", Box.interval(-1.0, 1.0), ProbeVerdict.CONSISTENT),
    (QcxKind.STRICT, "constant", Box.interval(-1.0, 1.0), ProbeVerdict.VIOLATED),
    (QcxKind.STRONG, "negquad", Box.interval(0.0, 1.0), ProbeVerdict.CONSISTENT),
    (QcxKind.STRONG, "cubic_shifted", Box.interval(-0.5, 0.5), ProbeVerdict.VIOLATED),
])
def test_quasiconvexity_verdicts(kind, name, box, verdict):
    """
    Each builtin gets the expected verdict for each quasiconvexity variant.
    """
    assert _probe(kind, name, box).verdict is verdict


def test_violation_records_both_sides():
    """
    A violation keeps the triple and both sides of the inequality.
    """
    report = _probe(QcxKind.QUASICONVEX, "indicator_spike", Box.interval(-1.0, 1.0))
    v = report.violator
    assert v["lhs"] > v["rhs"]
    assert set(v) == {"x", "y", "lambda", "lhs", "rhs"}


def test_strong_probe_label_carries_beta():
    """
    The strong variant reports the modulus it was checked with.
    """
    report = _probe(QcxKind.STRONG, "negquad", Box.interval(0.0, 1.0), beta=0.5)
    assert report.property == "strong(beta=0.5)"


def test_modulus_estimate_of_halfsquare():
    """
    halfsquare is strongly quasiconvex with modulus at least 1.
    """
    f = builtin("halfsquare")
    box = Box.interval(-1.0, 1.0)
    beta = estimate_strong_qcx_modulus(f, box, lattice_triples(f, box))
    assert 1.0 - 1e-6 <= beta < math.inf


def test_modulus_estimate_is_negative_without_quasiconvexity():
    """
    A function that is not quasiconvex gets a negative modulus estimate.
    """
    f = builtin("indicator_spike")
    box = Box.interval(-1.0, 1.0)
    assert estimate_strong_qcx_modulus(f, box, lattice_triples(f, box)) < 0


# =================================================================
# 3. Coercivity
# =================================================================
@pytest.mark.parametrize("name, expected", [
    ("halfsquare", Coercivity.SUPERCOERCIVE),
    ("abs", Coercivity.COERCIVE),
    ("negabs", Coercivity.TWO_WEAKLY_COERCIVE),
    ("negcubic", Coercivity.NOT_TWO_WEAKLY_COERCIVE),
    ("negquad", Coercivity.BOUNDED_DOMAIN),
])
def test_coercivity_ladder(name, expected):
    """
    Growth along rays classifies each builtin on the coercivity ladder.
    """
    report = coercivity_probe(builtin(name))
    assert report.classification is expected
    assert report.heuristic


def test_coercivity_in_two_dimensions():
    """
    Bounded coordinates are not probed.
    """
    report = coercivity_probe(builtin("quad2d"))
    # x1 is bounded, so only the x2 axis directions are probed
    assert report.classification is Coercivity.SUPERCOERCIVE
    assert len(report.directions) == 2


def test_coercivity_rejects_bad_radii():
    """
    Radii must be at least two and increasing.
    """
    with pytest.raises(ValueError):
        coercivity_probe(builtin("abs"), radii=(10.0,))
    with pytest.raises(ValueError):
        coercivity_probe(builtin("abs"), radii=(10.0, 5.0))


# =================================================================
# 4. Identities
# =================================================================
def test_identity_selftest():
    """
    The algebraic identities hold on random samples and on the fixed cases.
    """
    report = identity_selftest(samples=500, seed=1)
    assert report.consistent
    assert report.samples == 2 * 503
