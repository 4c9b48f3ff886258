"""Exception hierarchy shared by all modules.

The CLI maps these onto its exit codes: structural and sampling failures are
mathematical (1), configuration problems are input errors (2) and numerical
failures are non-convergence (3).
"""


class TripletError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(TripletError, ValueError):
    """Invalid parameters or malformed input descriptors."""


class InvalidElementError(ConfigurationError, IndexError):
    """A group element index outside ``[0, order)``."""


class DomainError(TripletError, ValueError):
    """A numeric argument outside the domain of a closed-form function."""


class StructuralError(TripletError):
    """A combinatorial invariant does not hold.

    ``report`` carries the failing :class:`~triplet_hde.triplet.ConditionReport`
    (or another witness object) when one is available.
    """

    def __init__(self, message, report=None, witness=None):
        super().__init__(message)
        self.report = report
        self.witness = witness


class IrregularGraphError(StructuralError):
    def __init__(self, vertex, degree, expected):
        super().__init__(
            f"vertex {vertex} has degree {degree}, expected {expected}",
            witness={"vertex": vertex, "degree": degree, "expected": expected},
        )
        self.vertex = vertex
        self.degree = degree
        self.expected = expected


class NumericalError(TripletError, ArithmeticError):
    """An iterative method failed to reach the requested tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SamplingError(TripletError):
    def __init__(self, message, attempts=0):
        super().__init__(message)
        self.attempts = attempts
