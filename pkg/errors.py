"""
Typed errors raised across the package.

Every class also derives from a builtin (ValueError or ArithmeticError) so that
callers written against the builtins keep catching them.
"""


class SkewLabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(SkewLabError, ValueError):
    """A model, scheme, noise or experiment configuration is unusable."""


class DomainError(SkewLabError, ValueError):
    """An argument lies outside the domain of the operation."""


class GenerationError(SkewLabError, ValueError):
    """A random scheme produced an invalid object (e.g. non-increasing times)."""


class ConsistencyError(SkewLabError, ValueError):
    """An internal identity or lookup that must hold exactly did not."""


class DegenerateDenominatorError(SkewLabError, ArithmeticError):
    """A ratio estimator hit a denominator below its guard threshold."""

    def __init__(self, quantity: str, value: float, guard: float):
        self.quantity = quantity
        self.value = value
        self.guard = guard
        super().__init__(f"{quantity}={value!r} is below the guard {guard!r}")


class KernelValidityError(SkewLabError, ValueError):
    """A pre-averaging weight function violates g(0)=g(1)=0, continuity or psi3 != 0."""


class DegenerateCounterexampleError(SkewLabError, ValueError):
    """The chosen a gives a vanishing sine integral, so c_n does not oscillate."""

    def __init__(self, a: float, b_value: float):
        self.a = a
        self.b_value = b_value
        super().__init__(f"a={a!r} gives |B|={abs(b_value):.3e} < 1e-10; pick another a")
