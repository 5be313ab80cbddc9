from enum import Enum


class Closure(Enum):
    """Which ends of a piece interval belong to the piece.

    The source examples mix ``1 <= x <= 2`` with ``k < x <= k+1``, so the
    convention is stored per piece instead of globally.
    """

    LEFT = "[)"     #: closed at lo, open at hi
    RIGHT = "(]"    #: open at lo, closed at hi
    BOTH = "[]"     #: closed at both ends
    OPEN = "()"     #: open at both ends

    @property
    def closed_lo(self) -> bool:
        return self in (Closure.LEFT, Closure.BOTH)

    @property
    def closed_hi(self) -> bool:
        return self in (Closure.RIGHT, Closure.BOTH)


class PieceKind(Enum):
    """Symbolic form of a piece."""

    POLY = "poly"             #: c0 + c1 x + c2 x^2 + c3 x^3
    LOGAFFINE = "logaffine"   #: a x + s ln(1 + b x) + c


class Continuity(Enum):
    """Behaviour of a function at a breakpoint."""

    CONTINUOUS = "continuous"
    LSC = "lsc"
    NOT_LSC = "not-lsc"


class Attainment(Enum):
    """Whether the prox infimum is known to be attained."""

    VERIFIED = "verified"
    UNVERIFIED = "unverified"
    DIVERGENT = "divergent"


class Multiplicity(Enum):
    SINGLE = "single"
    MULTIPLE = "multiple"


class CertificateStatus(Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    INDETERMINATE = "indeterminate"


class BoundType(Enum):
    """Classification of one (z, x) constraint ``alpha * ip >= lhs``."""

    LOWER = "lower"
    UPPER = "upper"
    VACUOUS = "vacuous"
    INFEASIBLE = "infeasible"


class SubdiffKind(Enum):
    CONVEX = "convex"
    GUTIERREZ = "gutierrez"
    PLASTRIA = "plastria"


class Membership(Enum):
    MEMBER = "member"
    NON_MEMBER = "non-member"


class QcxKind(Enum):
    QUASICONVEX = "quasiconvex"
    SEMISTRICT = "semistrict"
    STRICT = "strict"
    STRONG = "strong"


class ProbeVerdict(Enum):
    CONSISTENT = "consistent"
    VIOLATED = "violated"


class Coercivity(Enum):
    """Levels of the coercivity ladder, strongest first."""

    SUPERCOERCIVE = "supercoercive"
    COERCIVE = "coercive"
    WEAKLY_COERCIVE = "weakly-coercive"
    TWO_WEAKLY_COERCIVE = "2-weakly-coercive"
    NOT_TWO_WEAKLY_COERCIVE = "not-2-weakly-coercive"
    BOUNDED_DOMAIN = "bounded-domain"


class StopReason(Enum):
    """Why a proximal point run stopped."""

    STEP_TOL = "step_tol"
    VALUE_TOL = "value_tol"
    MAX_ITERS = "max_iters"
    PROX_FAILURE = "prox_failure"


class StepMode(Enum):
    """Feasible set of each proximal step."""

    BOX = "box"             #: prox_h(K, x^k)
    SUBLEVEL = "sublevel"   #: prox_h(S_{h(x^k)}(h) ∩ K, x^k)
