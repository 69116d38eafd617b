"""Exception types raised by gonodyn."""


class GonodynError(Exception):
    """Base class for all gonodyn errors."""


class ParameterError(GonodynError, ValueError):
    pass


class NegativeCoefficient(ParameterError):
    def __init__(self, name, value):
        self.name = name
        self.value = value
        super().__init__(f"coefficient {name} = {value!r} is negative")


class NormalizationViolation(ParameterError):
    """A coefficient group does not sum to one.

    ``group`` names the group (``"a"``, ``"b"``, ``"c"``, ``"d"`` for the
    hemophilia operator, or an ``(i, r)`` pair for a general operator) and
    ``residual`` is ``sum - 1``.
    """

    def __init__(self, group, residual):
        self.group = group
        self.residual = residual
        super().__init__(
            f"coefficient group {group!r} sums to 1{residual:+.3g}, expected 1")


class DimensionMismatch(GonodynError, ValueError):
    pass


class StateOverflow(GonodynError, ArithmeticError):
    """The image of a state has a non-finite coordinate."""


class NotAFixedPoint(GonodynError, ValueError):
    def __init__(self, residual, tol):
        self.residual = residual
        super().__init__(f"residual {residual:.3g} exceeds fixed-point tolerance {tol:.0e}")


class IdentityViolated(GonodynError, ValueError):
    """``8 - 4 p1 + 2 p2 + p3`` is not zero, so 2 is not a root."""

    def __init__(self, value, tol):
        self.value = value
        super().__init__(f"8 - 4p1 + 2p2 + p3 = {value:.3g} (tolerance {tol:.0e})")


class SingularJacobianAtSeed(GonodynError, ArithmeticError):
    pass


class NoConvergence(GonodynError, ArithmeticError):
    pass


class NotOnSupportedSubspace(GonodynError, ValueError):
    pass


class ParameterConditionViolated(GonodynError, ValueError):
    pass


class NegativeCoordinate(GonodynError, ValueError):
    pass


class InvariantViolation(GonodynError, AssertionError):
    """A proven identity failed numerically; indicates a defect."""
