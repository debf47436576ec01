"""Exception hierarchy shared by all subpackages."""


class KreinSpectraError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(KreinSpectraError):
    """Factorization or convergence failure (CLI exit code 2)."""


class NotPositiveDefinite(NumericalError):
    def __init__(self, index, pivot):
        super().__init__(f"non-positive pivot {pivot:.6g} at index {index}")
        self.index = index
        self.pivot = pivot


class BreakdownError(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class OnEigenvalue(NumericalError):
    """The shift coincides with a pencil eigenvalue within the zero tolerance.

    ``count`` holds the strict count below the shift and ``n_zero`` the
    number of zero pivots, so callers can still report a value.
    """

    def __init__(self, lam, count, n_zero):
        super().__init__(f"lambda={lam:.12g} lies on the spectrum ({n_zero} zero pivot(s))")
        self.lam = lam
        self.count = count
        self.n_zero = n_zero


class BracketingFailure(NumericalError):
    pass


class MinimizationAtBoundary(NumericalError):
    pass


class EmptyBasis(KreinSpectraError):
    pass


class DerivativeTooHigh(KreinSpectraError):
    pass


class ConfigError(KreinSpectraError):
    """Configuration problem (CLI exit code 1)."""


class ParseError(ConfigError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class ValidationError(ConfigError, ValueError):
    pass
