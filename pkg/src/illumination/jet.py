"""Truncated Taylor series ("jet") arithmetic.

A jet of order ``n`` is stored as an array of shape ``(n + 1, N)``: row ``k``
holds ``f^(k)(c) / k!`` for each of ``N`` centers ``c``. Every primitive below
works column-wise, so one tree walk yields derivatives at many centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf as _erf

from .errors import DomainError, NonFiniteError
from .expr import Binary, Constant, Expr, NamedConstant, Unary, Variable, as_expr

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


@dataclass(frozen=True)
class Jet:
    center: float
    order: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.order + 1:
            raise ValueError("coeffs must have order + 1 entries")

    def derivative(self, k: int) -> float:
        return math.factorial(k) * self.coeffs[k]


# -- primitives ----------------------------------------------------------------


def constant(value, order, n):
    out = np.zeros((order + 1, n))
    out[0] = value
    return out


def variable(centers, order):
    out = np.zeros((order + 1, centers.shape[0]))
    out[0] = centers
    if order >= 1:
        out[1] = 1.0
    return out


def mul(a, b):
    out = np.empty_like(a)
    for k in range(a.shape[0]):
        out[k] = (a[: k + 1] * b[k::-1]).sum(axis=0)
    return out


def div(a, b):
    out = np.empty_like(a)
    b0 = b[0]
    for k in range(a.shape[0]):
        acc = a[k].copy()
        if k:
            acc -= (b[1 : k + 1] * out[k - 1 :: -1]).sum(axis=0)
        out[k] = acc / b0
    return out


def _weighted(a, g, k):
    # sum_{j=1..k} j * a[j] * g[k-j]
    j = np.arange(1, k + 1)[:, None]
    return (j * a[1 : k + 1] * g[k - 1 :: -1]).sum(axis=0)


def exp(a):
    out = np.empty_like(a)
    out[0] = np.exp(a[0])
    for k in range(1, a.shape[0]):
        out[k] = _weighted(a, out, k) / k
    return out


def log(a):
    out = np.empty_like(a)
    a0 = a[0]
    out[0] = np.log(a0)
    for k in range(1, a.shape[0]):
        acc = a[k].copy()
        if k > 1:
            j = np.arange(1, k)[:, None]
            acc -= (j * out[1:k] * a[k - 1 : 0 : -1]).sum(axis=0) / k
        out[k] = acc / a0
    return out


def sqrt(a):
    out = np.empty_like(a)
    out[0] = np.sqrt(a[0])
    for k in range(1, a.shape[0]):
        acc = a[k].copy()
        if k > 1:
            acc -= (out[1:k] * out[k - 1 : 0 : -1]).sum(axis=0)
        out[k] = acc / (2.0 * out[0])
    return out


def sincos(a):
    s = np.empty_like(a)
    c = np.empty_like(a)
    s[0] = np.sin(a[0])
    c[0] = np.cos(a[0])
    for k in range(1, a.shape[0]):
        s[k] = _weighted(a, c, k) / k
        c[k] = -_weighted(a, s, k) / k
    return s, c


def erf(a):
    gauss = exp(-mul(a, a))
    out = np.empty_like(a)
    out[0] = _erf(a[0])
    for k in range(1, a.shape[0]):
        out[k] = _TWO_OVER_SQRT_PI * _weighted(a, gauss, k) / k
    return out


def ipow(a, p: int):
    """Integer power by repeated squaring; negative ``p`` goes through ``div``."""
    n = abs(p)
    if n == 0:
        return constant(1.0, a.shape[0] - 1, a.shape[1])
    result = None
    base = a
    while n:
        if n & 1:
            result = base if result is None else mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    if p < 0:
        result = div(constant(1.0, a.shape[0] - 1, a.shape[1]), result)
    return result


# -- tree walk -------------------------------------------------------------------


def _fail(node, centers, mask, reason, cls=DomainError):
    bad = centers[np.asarray(mask)]
    raise cls(node, float(bad[0]) if bad.size else float("nan"), reason)


def _eval(node, centers, order):
    n = centers.shape[0]
    if isinstance(node, Constant):
        return constant(node.value, order, n)
    if isinstance(node, NamedConstant):
        return constant(node.value, order, n)
    if isinstance(node, Variable):
        return variable(centers, order)
    if isinstance(node, Unary):
        a = _eval(node.child, centers, order)
        op = node.op
        if op == "neg":
            return -a
        if op == "exp":
            return exp(a)
        if op == "sin":
            return sincos(a)[0]
        if op == "cos":
            return sincos(a)[1]
        if op == "erf":
            return erf(a)
        if op == "ln":
            if np.any(a[0] <= 0):
                _fail(node, centers, a[0] <= 0, "logarithm of a non-positive value")
            return log(a)
        if op == "sqrt":
            bad = a[0] < 0 if order == 0 else a[0] <= 0
            if np.any(bad):
                _fail(node, centers, bad, "square root not smooth at non-positive argument")
            return sqrt(a)
        raise AssertionError(op)
    if isinstance(node, Binary):
        a = _eval(node.left, centers, order)
        if node.op == "pow":
            return _pow(node, a, centers, order)
        b = _eval(node.right, centers, order)
        if node.op == "add":
            return a + b
        if node.op == "sub":
            return a - b
        if node.op == "mul":
            return mul(a, b)
        if np.any(b[0] == 0):
            _fail(node, centers, b[0] == 0, "division by zero")
        return div(a, b)
    raise TypeError(f"not an expression node: {node!r}")


def _pow(node, base, centers, order):
    p = float(_eval(node.right, centers[:1], 0)[0, 0])
    if not math.isfinite(p):
        _fail(node, centers, np.ones_like(centers, bool), "exponent is not finite", NonFiniteError)
    if p == round(p):
        ip = int(p)
        if ip < 0 and np.any(base[0] == 0):
            _fail(node, centers, base[0] == 0, "negative power of zero")
        return ipow(base, ip)
    if np.any(base[0] <= 0):
        _fail(node, centers, base[0] <= 0, "non-integer power of a non-positive base")
    return exp(p * log(base))


def jet_coeffs(f, centers, order: int) -> np.ndarray:
    """Scaled derivatives of ``f`` at every center.

    Returns an array of shape ``(order + 1, len(centers))`` with entry
    ``[k, i] = f^(k)(centers[i]) / k!``.

    Raises
    ------
    DomainError
        Some sub-expression is undefined or not smooth at one of the centers.
    NonFiniteError
        Evaluation overflowed (for instance ``exp`` of a large argument).
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    f = as_expr(f)
    centers = np.atleast_1d(np.asarray(centers, dtype=float))
    with np.errstate(all="ignore"):
        out = _eval(f, centers, order)
    finite = np.isfinite(out)
    if not finite.all():
        _fail(f, centers, ~finite.all(axis=0), "evaluation overflowed or produced NaN", NonFiniteError)
    return out


def eval_jet(f, center: float, order: int) -> Jet:
    """Jet of ``f`` at a single center: ``coeffs[k] = f^(k)(center) / k!``."""
    center = float(center)
    if not math.isfinite(center):
        raise ValueError("center must be finite")
    coeffs = jet_coeffs(f, [center], order)[:, 0]
    return Jet(center, order, tuple(float(v) for v in coeffs))


def evaluate(f, x):
    """Plain function value(s) ``f(x)``; accepts a scalar or an array."""
    if np.ndim(x) == 0:
        return float(jet_coeffs(f, [x], 0)[0, 0])
    return jet_coeffs(f, x, 0)[0]
