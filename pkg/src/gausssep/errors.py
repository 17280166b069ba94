"""Exception hierarchy for the gausssep package."""


class GaussSepError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(GaussSepError):
    """Parameter set violates a construction invariant (e.g. negative occupation)."""


class StructuralError(GaussSepError):
    """Matrix input violates a structural requirement (Hermiticity, shape)."""


class SingularBlockError(GaussSepError):
    """Upper-left block of a Schur decomposition is numerically singular."""


class DegenerateBoundError(GaussSepError):
    """Closed-form bound is undefined because its denominator is degenerate."""


class DomainError(GaussSepError):
    """Input lies outside the domain of a transform prescription."""


class PrescriptionInapplicableError(DomainError):
    """The invariant-form reduction prescription does not produce the target pattern.

    Carries the residual of the failed reduction in ``residual``.
    """

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class SamplingBudgetError(GaussSepError):
    """Rejection sampler exhausted its draw budget."""
