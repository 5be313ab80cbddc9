import math
from typing import Callable, Tuple

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


def golden_section(
        func: Callable[[float], float],
        a: float,
        b: float,
        tol: float = 1e-10
) -> Tuple[float, float, float]:
    """Golden-section search for a minimum of `func` on ``[a, b]``.

    `func` is assumed unimodal on the bracket. Values may be ``+inf`` (points
    outside a sublevel constraint) while one of the two probes stays finite.

    Parameters
    ----------
    func : Callable
        Scalar function of one real variable.
    a, b : float
        Bracket ends, in any order.
    tol : float, optional
        Width of the final bracket. Defaults to 1e-10.

    Returns
    -------
    tuple of (float, float, float)
        The best probed point, its value, and the width of the final bracket.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = (a + b) / 2
        return x, func(x), h

    # Required steps to achieve tolerance
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = func(c)
    yd = func(d)

    for _ in range(n - 1):
        if yc < yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = func(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = func(d)

    if yc < yd:
        return c, yc, d - a
    return d, yd, b - c
