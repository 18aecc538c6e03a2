"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Input vector dimension does not match the function's dimension."""


class NonFiniteInput(ValueError):
    """Input contains NaN or infinite coordinates."""


class NonFiniteState(RuntimeError):
    """A dynamical state became non-finite where that is not representable."""


class OutOfHorizon(ValueError):
    """Interpolation time lies outside the defined interval."""


class HorizonMismatch(ValueError):
    """Discrete path and flow solution do not share a common horizon."""


class InvalidQuery(ValueError):
    """Stability query violates its own constraints."""


class NotConvex(ValueError):
    """Operation requires a convex catalog function."""


class OnNullSet(ValueError):
    """Point lies on the axis set {x1*x2 = 0} where the closed-form update is undefined."""


class PreconditionViolated(ValueError):
    """Checked operation was called outside its stated precondition region."""
