import json
from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from .catalog import Box, FunctionSpec, Piece, parse_bound
from .error import CatalogError
from .state import Closure, PieceKind


def _bound(value):
    try:
        return parse_bound(value)
    except CatalogError as exc:
        raise ValueError(str(exc))


class PieceModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lo: float
    hi: float
    closure: Closure = Closure.LEFT
    kind: PieceKind = PieceKind.POLY
    coeffs: List[float]

    @field_validator("lo", "hi", mode="before")
    @classmethod
    def _parse_bound(cls, value):
        return _bound(value)


class BoundsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lo: Union[float, List[float]]
    hi: Union[float, List[float]]

    @field_validator("lo", "hi", mode="before")
    @classmethod
    def _parse_bounds(cls, value):
        if isinstance(value, (list, tuple)):
            return [_bound(v) for v in value]
        return _bound(value)

    def to_box(self) -> Box:
        lower = self.lo if isinstance(self.lo, list) else [self.lo]
        upper = self.hi if isinstance(self.hi, list) else [self.hi]
        return Box(tuple(lower), tuple(upper))


class FunctionSpecModel(BaseModel):
    """JSON shape of a `FunctionSpec`.

    Examples
    --------
    >>> FunctionSpecModel.model_validate({
    ...     "id": "negquad", "dimension": 1,
    ...     "pieces": [{"lo": 0, "hi": 1, "closure": "[]", "kind": "poly", "coeffs": [0, -1, -1]}],
    ...     "domain": {"lo": 0, "hi": 1},
    ... }).to_spec()
    """

    model_config = ConfigDict(extra="forbid")

    id: str
    dimension: Literal[1, 2] = 1
    pieces: List[PieceModel] = []
    domain: BoundsModel
    exceptions: List[Tuple[float, float]] = []
    closed_form_prox: Optional[str] = None
    components: Optional[List["FunctionSpecModel"]] = None

    def to_spec(self) -> FunctionSpec:
        components = None
        if self.components is not None:
            components = tuple(c.to_spec() for c in self.components)
        pieces = tuple(Piece(p.lo, p.hi, p.closure, p.kind, tuple(p.coeffs)) for p in self.pieces)
        return FunctionSpec(
            self.id, self.dimension, pieces, self.domain.to_box(),
            tuple(self.exceptions), self.closed_form_prox, components,
        )


FunctionSpecModel.model_rebuild()


def _describe(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"])
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def spec_from_dict(data: dict) -> FunctionSpec:
    """Validate a JSON object and build the immutable spec.

    Raises
    ------
    CatalogError
        If the object does not match the schema or describes an invalid spec;
        the message names the offending field.
    """
    try:
        model = FunctionSpecModel.model_validate(data)
    except ValidationError as exc:
        raise CatalogError(f"Invalid function spec: {_describe(exc)}")
    return model.to_spec()


def spec_from_json(text: str) -> FunctionSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"Function spec is not valid JSON: {exc}")
    return spec_from_dict(data)


def spec_to_dict(f: FunctionSpec) -> dict:
    """Serialise a spec to the JSON shape read by `spec_from_dict`."""
    data = {
        "id": f.id,
        "dimension": f.dimension,
        "pieces": [p.to_dict() for p in f.pieces],
        "domain": f.domain.to_dict(),
    }
    if f.exceptions:
        data["exceptions"] = [[p, v] for p, v in f.exceptions]
    if f.closed_form_prox is not None:
        data["closed_form_prox"] = f.closed_form_prox
    if f.components is not None:
        data["components"] = [spec_to_dict(c) for c in f.components]
    return data


def spec_to_json(f: FunctionSpec) -> str:
    return json.dumps(spec_to_dict(f), sort_keys=True)

