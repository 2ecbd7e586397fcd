"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the domain an operation is defined on
    (non-finite input, non-positive length, angle beyond the small-angle
    regime, ...)."""


class UnsupportedShapeError(ValueError):
    """The mask shape has no closed-form Fourier transform; use the
    numeric transform instead."""


class ResolutionError(ValueError):
    """The quadrature grid is too coarse for the requested detector
    coordinates and would alias the kernel oscillation."""


class CostBudgetError(ValueError):
    """The 4D quadrature would exceed the configured evaluation budget."""


class FeatureNotFoundError(RuntimeError):
    """A profile feature (zero crossing, half-maximum crossing) does not
    exist inside the scanned range."""


class InvalidMetricsError(ValueError):
    """Pattern metrics are unusable for the requested comparison."""


class FitConvergenceError(RuntimeError):
    """The least-squares fit did not converge; carries the last iterate."""

    def __init__(self, message, params=None, chi_square=None, iterations=None):
        super().__init__(message)
        self.params = params
        self.chi_square = chi_square
        self.iterations = iterations


class ConfigError(ValueError):
    """A run-configuration document is malformed; carries the key path."""

    def __init__(self, key, reason):
        super().__init__(f"{key}: {reason}")
        self.key = key
        self.reason = reason
