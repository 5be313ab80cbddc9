class ProxCvxError(Exception):
    """Base class for all exceptions raised by the proxcvx library."""
    pass


# --- Catalog related ---
class CatalogError(ProxCvxError):
    """Raised when a function specification or a box is malformed.

    Examples
    --------
    - Pieces that leave a gap or overlap inside the declared domain.
    - A polynomial piece with more than four coefficients (degree > 3).
    - A box whose lower bound exceeds its upper bound.
    """
    pass


class UnknownFunctionError(CatalogError):
    """Raised when `builtin()` is asked for a name it does not know."""
    pass


class InvalidParameterError(CatalogError):
    """Raised when a builtin receives parameters outside their valid range.

    The staircase family, for instance, is only defined for ``n >= 3``.
    """
    pass


# --- Prox subproblem related ---
class ProxError(ProxCvxError):
    """Base class for failures of the proximal subproblem."""
    pass


class EmptyFeasibleSetError(ProxError):
    """Raised when the feasible set and the domain of the function do not meet."""
    pass


class NonseparableError(ProxError):
    """Raised when a 2-D query is made on a spec without separable components."""
    pass


class DivergentProxError(ProxError):
    """Raised when a finite prox value is required but the subproblem is unbounded.

    The solver reports divergence as a flag on `ProxResult`; operations that
    need an attained minimiser (the Moreau envelope, its gradient, firm
    nonexpansiveness checks) convert that flag into this exception.
    """
    pass


class MultivaluedProxError(ProxError):
    """Raised when an operation presupposes a single-valued proximity operator.

    A multivalued prox is itself a certificate that the function is not
    prox-convex on the set, so callers that select among minimisers would hide
    that fact.
    """
    pass


# --- Input related ---
class InfeasiblePointError(ProxCvxError):
    """Raised when a point required to lie in set ∩ dom does not."""
    pass


class DimensionMismatchError(ProxCvxError):
    """Raised when a vector argument does not have the dimension of the function."""
    pass


class ConfigError(ProxCvxError):
    """Raised when a run configuration is invalid.

    The message names the offending field so the command line can report it
    without a traceback.
    """
    pass
