"""The Taylor mean: the point in ``(a, b)`` where ``P_a`` and ``P_b`` agree."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NoSignChange
from .expr import as_expr
from .jet import jet_coeffs
from .taylor import check_odd_order, eval_poly, taylor_poly


class HypothesisWarning(UserWarning):
    """``f^(r+1)`` was seen negative on ``[a, b]``; the mean may not be unique."""


@dataclass(frozen=True)
class MeanResult:
    value: float
    a: float
    b: float
    bracket_width: float
    iterations: int


def taylor_mean(f, r: int, a: float, b: float, samples: int = 256) -> MeanResult:
    """Bisect ``d(x) = P_b(x) - P_a(x)`` on ``[a, b]``.

    ``d(a) = -E_b(a) <= 0`` and ``d(b) = E_a(b) >= 0`` whenever ``f^(r+1) >= 0``
    on ``[a, b]``, so the root is bracketed. Bisection stops when the bracket
    is no wider than ``1e-13 * (b - a)``.

    Raises
    ------
    NoSignChange
        ``d(a)`` and ``d(b)`` do not have strictly opposite signs.
    """
    r = check_odd_order(r)
    a, b = float(a), float(b)
    if not a < b:
        raise ValueError("need a < b")
    f = as_expr(f)

    x = np.linspace(a, b, samples)
    deriv = jet_coeffs(f, x, r + 1)[r + 1]
    if deriv.min() < 0:
        warnings.warn(
            f"f^({r + 1}) takes negative values on [{a}, {b}]; the mean may not exist or be unique",
            HypothesisWarning,
            stacklevel=2,
        )

    pa = taylor_poly(f, a, r)
    pb = taylor_poly(f, b, r)

    def d(x):
        return eval_poly(pb, x) - eval_poly(pa, x)

    da, db = d(a), d(b)
    if not (da * db < 0):
        raise NoSignChange(a, b, da, db)

    lo, hi, dlo = a, b, da
    target = 1e-13 * (b - a)
    iterations = 0
    while hi - lo > target:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        dm = d(mid)
        iterations += 1
        if dm == 0:
            lo = hi = mid
            break
        if math.copysign(1.0, dm) == math.copysign(1.0, dlo):
            lo, dlo = mid, dm
        else:
            hi = mid
    return MeanResult(0.5 * (lo + hi), a, b, hi - lo, iterations)
