"""Odd-order Taylor polynomials and the integral-remainder cross-check."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvenOrder
from .expr import as_expr
from .jet import eval_jet, evaluate, jet_coeffs
from .quadrature import adaptive_gk15


def check_odd_order(order) -> int:
    if isinstance(order, bool) or int(order) != order or order < 1 or order % 2 == 0:
        raise EvenOrder(order)
    return int(order)


@dataclass(frozen=True)
class TaylorPoly:
    """Order-``order`` Taylor polynomial about ``center``.

    ``centered_coeffs[k]`` multiplies ``(x - center)**k``; ``canonical_coeffs[k]``
    multiplies ``x**k``.
    """

    center: float
    order: int
    centered_coeffs: tuple
    canonical_coeffs: tuple

    def __call__(self, x):
        return eval_poly(self, x)


@dataclass(frozen=True)
class RemainderCheck:
    x: float
    taylor_error: float
    quadrature_value: float
    abs_gap: float
    quad_nodes_used: int


def to_canonical(centered, center) -> np.ndarray:
    """Binomial re-expansion of ``sum a_k (x - c)^k`` into powers of ``x``."""
    centered = np.asarray(centered, dtype=float)
    n = centered.shape[0]
    out = np.zeros(n)
    neg_c = -float(center)
    for k in range(n):
        for j in range(k + 1):
            out[j] += centered[k] * math.comb(k, j) * neg_c ** (k - j)
    return out


def taylor_poly(f, center: float, order: int) -> TaylorPoly:
    order = check_odd_order(order)
    jet = eval_jet(as_expr(f), center, order)
    canonical = to_canonical(jet.coeffs, jet.center)
    return TaylorPoly(jet.center, order, jet.coeffs, tuple(float(v) for v in canonical))


def eval_poly(p: TaylorPoly, x):
    """Horner evaluation of the centered form; ``x`` may be an array."""
    d = np.asarray(x, dtype=float) - p.center
    acc = np.zeros_like(d)
    for a in reversed(p.centered_coeffs):
        acc = acc * d + a
    return float(acc) if np.ndim(acc) == 0 else acc


def eval_canonical(p: TaylorPoly, x):
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    for a in reversed(p.canonical_coeffs):
        acc = acc * x + a
    return float(acc) if np.ndim(acc) == 0 else acc


def remainder_integrand(f, center, order, x):
    """``t -> f^(r+1)(t) (x - t)^r / r!`` as a vectorised callable."""
    f = as_expr(f)

    def integrand(t):
        top = jet_coeffs(f, t, order + 1)[order + 1]
        # f^(r+1)/r! = (r+1) * (f^(r+1)/(r+1)!)
        return (order + 1) * top * (x - t) ** order

    return integrand


def remainder_check(f, center: float, order: int, x: float, tol: float = 1e-10,
                    max_depth: int = 40) -> RemainderCheck:
    """Compare ``f(x) - P_c(x)`` with the integral form of the remainder.

    The integral ``(1/r!) * int_c^x f^(r+1)(t) (x - t)^r dt`` is computed by
    adaptive Gauss-Kronrod quadrature to absolute error ``tol``.
    """
    order = check_odd_order(order)
    if not tol > 0:
        raise ValueError("tol must be positive")
    f = as_expr(f)
    center, x = float(center), float(x)
    p = taylor_poly(f, center, order)
    taylor_error = evaluate(f, x) - eval_poly(p, x)
    quad, _, nodes = adaptive_gk15(
        remainder_integrand(f, center, order, x), center, x, tol, max_depth
    )
    return RemainderCheck(x, taylor_error, quad, abs(taylor_error - quad), nodes)
