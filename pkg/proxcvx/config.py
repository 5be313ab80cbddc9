import os
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .catalog import Box, FunctionSpec, GridSpec, builtin, parse_bound
from .error import CatalogError, ConfigError
from .pool import threads_from_env
from .prox_core import SolverConfig
from .schema import spec_from_json

Command = Literal["prox", "moreau", "certify", "subdiff", "ppa", "probe", "suite"]

SUBDIFF_KINDS = ("convex", "gutierrez", "plastria", "charmin", "strongly-g")
PROBE_KINDS = ("quasiconvex", "semistrict", "strict", "strong", "coercivity", "identities", "modulus")


def _vector(value):
    if value is None or isinstance(value, list):
        return value
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, str):
        try:
            return [parse_bound(v) for v in value.split(",")]
        except CatalogError as exc:
            raise ValueError(str(exc))
    return list(value)


def _param(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_function_ref(text: str) -> FunctionSpec:
    """Build a builtin from ``name`` or ``name:key=value,...``.

    Examples
    --------
    >>> parse_function_ref("staircase:n=4").id
    'staircase(n=4)'
    """
    name, _, rest = text.partition(":")
    params = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"function: parameter {item!r} is not of the form key=value")
        params[key.strip()] = _param(value.strip())
    return builtin(name.strip(), params)


class RunConfig(BaseModel):
    """Validated command-line configuration.

    Vector fields (``z``, ``x0``, ``x``, ``xi``) accept comma-separated strings.
    `function_json` holds an inline JSON spec or, when it does not start with
    ``{``, the path of a file containing one.
    """

    model_config = ConfigDict(extra="forbid")

    command: Command
    function: Optional[str] = None
    function_json: Optional[str] = None
    set: Optional[str] = None
    z: Optional[List[float]] = None
    gamma: float = Field(1.0, gt=0)
    alpha: Optional[float] = Field(None, gt=0)
    x0: Optional[List[float]] = None
    x: Optional[List[float]] = None
    xi: Optional[List[float]] = None
    kind: Optional[str] = None
    beta: float = 1.0
    max_iters: int = Field(200, ge=1)
    grid: Optional[int] = Field(None, ge=3)
    sublevel: bool = False
    output: Literal["json", "csv"] = "json"
    output_path: Optional[str] = None
    filter: Optional[str] = None
    threads: int = Field(default_factory=threads_from_env, ge=0)

    @field_validator("z", "x0", "x", "xi", mode="before")
    @classmethod
    def _parse_vector(cls, value):
        return _vector(value)

    @model_validator(mode="after")
    def _check_complete(self):
        if self.command != "suite":
            if (self.function is None) == (self.function_json is None):
                raise ValueError("exactly one of function / function_json is required")
        required = {"prox": ("z",), "moreau": ("z",), "ppa": ("x0",)}
        for name in required.get(self.command, ()):
            if getattr(self, name) is None:
                raise ValueError(f"{name} is required for '{self.command}'")
        if self.command == "subdiff":
            kind = self.kind or "charmin"
            if kind not in SUBDIFF_KINDS:
                raise ValueError(f"kind must be one of {', '.join(SUBDIFF_KINDS)} for 'subdiff'")
            if kind != "strongly-g" and self.x is None:
                raise ValueError(f"x is required for subdiff kind '{kind}'")
            if kind in ("convex", "gutierrez", "plastria") and self.xi is None:
                raise ValueError(f"xi is required for subdiff kind '{kind}'")
        if self.command == "probe" and (self.kind or "quasiconvex") not in PROBE_KINDS:
            raise ValueError(f"kind must be one of {', '.join(PROBE_KINDS)} for 'probe'")
        if self.output == "csv" and self.command not in ("certify", "ppa"):
            raise ValueError("csv output is only available for 'certify' and 'ppa'")
        return self

    @classmethod
    def load(cls, **values) -> "RunConfig":
        """Validate `values`, converting validation errors into `ConfigError`.

        Raises
        ------
        ConfigError
            Naming the offending field.
        """
        values = {k: v for k, v in values.items() if v is not None}
        try:
            return cls(**values)
        except ValidationError as exc:
            err = exc.errors()[0]
            field = ".".join(str(p) for p in err["loc"]) or "config"
            raise ConfigError(f"{field}: {err['msg']}")

    def resolve_function(self) -> FunctionSpec:
        try:
            if self.function is not None:
                return parse_function_ref(self.function)
            text = self.function_json
            if not text.lstrip().startswith("{"):
                with open(os.path.expanduser(text)) as f:
                    text = f.read()
            return spec_from_json(text)
        except OSError as exc:
            raise ConfigError(f"function_json: {exc}")

    def resolve_set(self, f: FunctionSpec) -> Box:
        """The ``--set`` box, or the function's domain when none is given."""
        if self.set is None:
            return f.domain
        try:
            box = Box.parse(self.set)
        except CatalogError as exc:
            raise ConfigError(f"set: {exc}")
        if box.dimension != f.dimension:
            raise ConfigError(f"set: {box.dimension}-D set for the {f.dimension}-D function '{f.id}'")
        return box

    def solver_config(self) -> SolverConfig:
        grid = GridSpec() if self.grid is None else GridSpec(points_per_coordinate=self.grid)
        return SolverConfig(grid=grid, threads=self.threads)
