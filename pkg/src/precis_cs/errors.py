"""Exception hierarchy.

Usage errors (bad arguments, mismatched shapes) derive from ``ValueError``
so callers that only care about "bad input" can catch that.
"""


class PrecisCSError(Exception):
    """Base class for every error raised by this package."""


class UsageError(PrecisCSError, ValueError):
    """Arguments violate an operation's preconditions."""


class DomainError(PrecisCSError, ValueError):
    """A quantity is mathematically undefined for the given input."""


class SingularMatrixError(PrecisCSError, ArithmeticError):
    """Pivoted elimination met a pivot below the singularity threshold."""

    def __init__(self, pivot, threshold):
        self.pivot = float(pivot)
        self.threshold = float(threshold)
        super().__init__(
            f"matrix is singular to working precision "
            f"(pivot {self.pivot:.3e} <= threshold {self.threshold:.3e})"
        )


class DegenerateLocatorError(PrecisCSError, ArithmeticError):
    """The locator's constant term vanishes: the support is smaller than assumed."""


class InconsistencyError(PrecisCSError, ArithmeticError):
    """Recovered data contradicts the model (e.g. complex values for a real signal)."""


class AmbiguityError(PrecisCSError, ArithmeticError):
    """More than one candidate explains the observation."""


class ReconstructionError(PrecisCSError, ArithmeticError):
    """No candidate support size reproduces the syndromes.

    ``residuals`` maps each attempted support size to its re-synthesis
    residual (``None`` when the attempt failed before producing one).
    """

    def __init__(self, residuals):
        self.residuals = dict(residuals)
        parts = ", ".join(
            f"t={t}: {'n/a' if r is None else f'{r:.3e}'}"
            for t, r in sorted(self.residuals.items())
        )
        super().__init__(f"no consistent reconstruction ({parts})")
