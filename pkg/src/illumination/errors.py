"""Exception hierarchy shared by every module of the package."""


class IlluminationError(Exception):
    """Base class for all errors raised by this package."""


class ExprSyntaxError(IlluminationError, ValueError):
    """Malformed function text. ``position`` is a 0-based character offset."""

    def __init__(self, position, message):
        self.position = position
        self.message = message
        super().__init__(f"{message} (at offset {position})")


class NonConstantExponent(ExprSyntaxError):
    pass


class UnknownIdentifier(ExprSyntaxError):
    pass


class DomainError(IlluminationError, ArithmeticError):
    """A sub-expression is undefined or not smooth at ``center``."""

    def __init__(self, node, center, reason=""):
        self.node = node
        self.center = center
        self.reason = reason
        msg = f"{node} is not smooth at x={center!r}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class NonFiniteError(DomainError):
    """Evaluation overflowed or produced NaN."""


class EvenOrder(IlluminationError, ValueError):
    def __init__(self, order):
        self.order = order
        super().__init__(f"Taylor order must be an odd positive integer, got {order!r}")


class QuadratureNonConvergence(IlluminationError, ArithmeticError):
    def __init__(self, max_depth, estimate=None, error=None):
        self.max_depth = max_depth
        self.estimate = estimate
        self.error = error
        super().__init__(
            f"adaptive quadrature hit depth cap {max_depth} (estimate={estimate!r}, error={error!r})"
        )


class PointOnGraph(IlluminationError, ValueError):
    def __init__(self, s, t, gap):
        self.s, self.t, self.gap = s, t, gap
        super().__init__(f"point ({s!r}, {t!r}) lies on the graph (|t - f(s)| = {gap:.3g})")


class NoSignChange(IlluminationError, ArithmeticError):
    def __init__(self, a, b, da, db):
        self.a, self.b, self.da, self.db = a, b, da, db
        super().__init__(
            f"P_b - P_a does not change sign on [{a!r}, {b!r}] (values {da:.6g}, {db:.6g})"
        )
