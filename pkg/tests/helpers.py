"""Shared test utilities: random smooth functions and an mpmath reference evaluator."""

import math

import mpmath

from illumination.expr import Binary, Constant, NamedConstant, Unary, Variable, parse


def random_function(rng, depth=3):
    """Text of a random function smooth on the whole real line."""
    if depth == 0 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.55:
            return "x"
        if roll < 0.65:
            return rng.choice(["pi", "e"])
        return f"({rng.uniform(-2, 2):.3f})"
    a = random_function(rng, depth - 1)
    kind = rng.randrange(10)
    if kind == 0:
        return f"sin({a})"
    if kind == 1:
        return f"cos({a})"
    if kind == 2:
        return f"exp(sin({a}))" if rng.random() < 0.5 else f"exp({a}/3)"
    if kind == 3:
        return f"erf({a})"
    if kind == 4:
        return f"sqrt(1+({a})^2)"
    if kind == 5:
        return f"ln(2+sin({a}))"
    b = random_function(rng, depth - 1)
    if kind == 6:
        return f"({a})+({b})"
    if kind == 7:
        return f"({a})-({b})"
    if kind == 8:
        return f"({a})*({b})"
    return f"({a})/(2+cos({b}))" if rng.random() < 0.5 else f"({a})^{rng.choice([2, 3])}"


def random_convex_quartic(rng):
    alpha = rng.uniform(0.05, 2.0)
    beta = rng.uniform(0.0, 2.0)
    gamma = rng.uniform(-2.0, 2.0)
    delta = rng.uniform(-2.0, 2.0)
    text = f"{alpha!r}*x^4+{beta!r}*x^2+({gamma!r})*x+({delta!r})"
    return text, (alpha, beta, gamma, delta)


def quartic_value(coeffs, x):
    alpha, beta, gamma, delta = coeffs
    return alpha * x**4 + beta * x**2 + gamma * x + delta


_MP_UNARY = {
    "neg": lambda v: -v,
    "sin": mpmath.sin,
    "cos": mpmath.cos,
    "exp": mpmath.exp,
    "ln": mpmath.log,
    "sqrt": mpmath.sqrt,
    "erf": mpmath.erf,
}


def mp_eval(node, x):
    """Evaluate an expression tree in mpmath; shares no code with the jet engine."""
    if isinstance(node, Constant):
        return mpmath.mpf(node.value)
    if isinstance(node, NamedConstant):
        return mpmath.pi if node.name == "pi" else mpmath.e
    if isinstance(node, Variable):
        return x
    if isinstance(node, Unary):
        return _MP_UNARY[node.op](mp_eval(node.child, x))
    a = mp_eval(node.left, x)
    b = mp_eval(node.right, x)
    if node.op == "add":
        return a + b
    if node.op == "sub":
        return a - b
    if node.op == "mul":
        return a * b
    if node.op == "div":
        return a / b
    p = float(b)
    return a ** int(p) if p == round(p) else a**b


def mp_derivative(text, x, k, dps=40):
    tree = parse(text)
    with mpmath.workdps(dps):
        return float(mpmath.diff(lambda u: mp_eval(tree, u), mpmath.mpf(x), k))


def close(a, b, rtol):
    return abs(a - b) <= rtol * max(1.0, abs(b))


def factorial(k):
    return math.factorial(k)
