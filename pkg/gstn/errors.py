"""Exceptions raised by the gstn modules.

Each error also derives from the builtin that describes it best, so callers
that only know about ValueError or RuntimeError still catch them.
"""


class GSTError(Exception):
    """Base class for gstn errors."""


class InvalidN(GSTError, ValueError):
    """Player count below three."""


class DimensionMismatch(GSTError, ValueError):
    """Vector length does not match the form."""


class EnumerationCapExceeded(GSTError, ValueError):
    """Exact enumeration requested above the configured player cap."""


class NoConvergence(GSTError, RuntimeError):
    """Jacobi sweeps exhausted before the off-diagonal norm vanished."""


class UnexpectedKernelDim(GSTError, ValueError):
    """Spectrum whose zero eigenvalue count is not one."""


class DegenerateB2(GSTError, ValueError):
    """The positive-block energy of b2 is not positive."""


class EmptySlice(GSTError, ValueError):
    """Slice with an empty positive or negative block."""


class SamplingStalled(GSTError, RuntimeError):
    """Rejection sampling could not reach the requested count."""

    def __init__(self, message, attempts=0, accepted=0):
        super(SamplingStalled, self).__init__(message)
        self.attempts = attempts
        self.accepted = accepted


class NoStablePlateau(GSTError, RuntimeError):
    """No run of equal resolved counts along the epsilon grid."""

    def __init__(self, message, report=None):
        super(NoStablePlateau, self).__init__(message)
        self.report = report


class DifferentComponents(GSTError, ValueError):
    """Path endpoints lie in different connected components."""


class ValidationFailed(GSTError, RuntimeError):
    """A witness path violates a tolerance."""

    def __init__(self, message, diagnostics=None):
        super(ValidationFailed, self).__init__(message)
        self.diagnostics = diagnostics
