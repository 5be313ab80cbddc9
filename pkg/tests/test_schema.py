import json

import pytest

from proxcvx.catalog import Box, builtin, builtin_names
from proxcvx.error import CatalogError
from proxcvx.schema import spec_from_dict, spec_from_json, spec_to_dict, spec_to_json
from proxcvx.state import Closure, PieceKind


NEGQUAD = {
    "id": "negquad",
    "dimension": 1,
    "pieces": [{"lo": 0, "hi": 1, "closure": "[]", "kind": "poly", "coeffs": [0, -1, -1]}],
    "domain": {"lo": 0, "hi": 1},
}


def test_spec_from_dict_builds_spec():
    """
    A JSON-shaped dict becomes a FunctionSpec with typed pieces.
    """
    f = spec_from_dict(NEGQUAD)
    assert f.id == "negquad"
    assert f.domain == Box.interval(0.0, 1.0)
    assert f.pieces[0].closure is Closure.BOTH
    assert f.pieces[0].kind is PieceKind.POLY
    assert f.evaluate(1.0) == pytest.approx(-2.0)


def test_spec_from_json_accepts_infinite_bounds():
    """
    "inf", "+inf" and "-inf" are accepted as bounds.
    """
    text = json.dumps({
        "id": "ramp",
        "pieces": [{"lo": "-inf", "hi": "+inf", "closure": "()", "coeffs": [0, 1]}],
        "domain": {"lo": "-inf", "hi": "inf"},
    })
    f = spec_from_json(text)
    assert f.domain == Box.whole()
    assert f.evaluate(3.0) == 3.0


@pytest.mark.parametrize("name", builtin_names())
def test_builtin_specs_survive_serialisation(name):
    """
    Every builtin serialises to an equal spec, piece by piece.
    """
    f = builtin(name)
    again = spec_from_json(spec_to_json(f))
    assert again == f
    assert again.pieces == f.pieces


def test_spec_to_dict_keeps_exceptions_and_components():
    """
    Exception points and 2-D components are written out.
    """
    spike = spec_to_dict(builtin("indicator_spike"))
    assert spike["exceptions"] == [[0.0, 1.0]]
    quad = spec_to_dict(builtin("quad2d"))
    assert [c["id"] for c in quad["components"]] == ["quad2d.x1", "quad2d.x2"]
    assert quad["domain"] == {"lo": [0.0, "-inf"], "hi": [2.0, "+inf"]}


# =================================================================
# Errors name the offending field
# =================================================================
def test_missing_domain_is_reported():
    """
    A spec without a domain names the missing field.
    """
    data = dict(NEGQUAD)
    del data["domain"]
    with pytest.raises(CatalogError, match="domain"):
        spec_from_dict(data)


def test_bad_closure_is_reported():
    """
    An unknown closure marker names the field.
    """
    data = json.loads(json.dumps(NEGQUAD))
    data["pieces"][0]["closure"] = "[["
    with pytest.raises(CatalogError, match="closure"):
        spec_from_dict(data)


def test_unknown_field_is_rejected():
    """
    Unknown fields are rejected by name.
    """
    data = dict(NEGQUAD, colour="red")
    with pytest.raises(CatalogError, match="colour"):
        spec_from_dict(data)


def test_tiling_errors_surface_as_catalog_errors():
    """
    Pieces that do not tile the domain are reported as catalog errors.
    """
    data = json.loads(json.dumps(NEGQUAD))
    data["pieces"][0]["hi"] = 0.5
    with pytest.raises(CatalogError):
        spec_from_dict(data)


def test_invalid_json_text():
    """
    Malformed text is reported as a JSON error.
    """
    with pytest.raises(CatalogError, match="JSON"):
        spec_from_json("{not json")
