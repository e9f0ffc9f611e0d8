"""Exception taxonomy shared by all eecrmt modules."""


class EECError(Exception):
    """Base class for all package-specific errors."""


class DomainError(EECError):
    """Argument outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested at a pole (e.g. gamma at a non-positive integer)."""


class ParamError(EECError):
    """Invalid family or ensemble parameters."""


class DegreeError(EECError):
    """Polynomial list does not have the required degrees."""


class SkewError(EECError):
    """Matrix is not skew-symmetric within tolerance."""


class PivotError(EECError):
    """A 2x2 pivot of the skew-moment elimination underflowed or lost positivity.

    Carries ``principal_size``, the size of the failing leading principal
    submatrix.  Usually fixable by raising the working precision.
    """

    def __init__(self, message, principal_size=None):
        super().__init__(message)
        self.principal_size = principal_size


class MomentError(EECError):
    """Weight does not supply enough finite moments for the requested size."""


class RangeError(EECError):
    """Index or argument outside the range covered by a built object."""


class ConvergenceError(EECError):
    """Numerical procedure failed to reach the requested tolerance.

    ``value`` holds the best available estimate, ``err_est`` its error bound.
    """

    def __init__(self, message, value=None, err_est=None):
        super().__init__(message)
        self.value = value
        self.err_est = err_est


class DegenerateError(EECError):
    """Quantity is degenerate (zero scale, zero denominator) and has no value."""


class PrecisionError(EECError):
    """Requested quantity is below the certified accuracy of its inputs."""


class BlowupError(EECError):
    """ODE trajectory left the trust region before reaching the target."""


class RejectionBudgetError(EECError):
    """Rejection sampler exhausted its proposal budget."""
