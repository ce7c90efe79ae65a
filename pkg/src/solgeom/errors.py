"""Exception hierarchy shared by the library and the CLI."""


class SolGeomError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SolGeomError, ValueError):
    """An argument lies outside the domain of a function."""


class AdmissibilityError(DomainError):
    """Constants of motion incompatible with a unit-speed geodesic.

    Attributes
    ----------
    threshold : float or None
        The admissibility bound that was violated, when one is known.
    """

    def __init__(self, message, threshold=None):
        super().__init__(message)
        self.threshold = threshold


class NormalizationError(DomainError):
    """A tangent vector that should have unit length does not."""


class GeodesicClassError(DomainError):
    """An operation received a geodesic of the wrong class."""


class PreconditionError(DomainError):
    """A numerical precondition (e.g. lying on a surface) failed."""


class IntegrationError(SolGeomError, RuntimeError):
    """The flow integrator could not meet its tolerance.

    Attributes
    ----------
    worst_residual : float
        Largest diagnostic residual observed on the failed attempt.
    """

    def __init__(self, message, worst_residual=float("nan")):
        super().__init__(message)
        self.worst_residual = worst_residual


class SolverError(SolGeomError, RuntimeError):
    """A root finder or shooting solver failed to converge.

    Attributes
    ----------
    best_residual : float
        Smallest residual reached before giving up.
    """

    def __init__(self, message, best_residual=float("nan")):
        super().__init__(message)
        self.best_residual = best_residual
