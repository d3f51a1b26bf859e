"""Exception hierarchy shared by every module of the package."""


class LatticeBECError(Exception):
    """Base class for all errors raised by lattice_bec."""


class InvalidParameterError(LatticeBECError, ValueError):
    """A physical or numerical parameter violates a precondition."""


class InvalidPotentialError(InvalidParameterError):
    """The lattice profile does not satisfy the single-well assumptions."""


class UnsupportedPotentialError(InvalidParameterError):
    """The requested quantity is only defined for even potentials."""


class NumericalFailureError(LatticeBECError, RuntimeError):
    """An iterative solver or eigensolver failed to meet its contract.

    The offending residual is kept on ``residual`` so callers (the CLI in
    particular) can report it.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NonConvergenceError(NumericalFailureError):
    """Maximum number of iterations reached before the tolerance."""


class GaugeFailureError(NumericalFailureError):
    """Consecutive Bloch functions are nearly orthogonal (band crossing)."""


class IllSeparatedBandError(NumericalFailureError):
    """The lowest band is not separated from the rest of the spectrum."""


class InvariantViolationError(LatticeBECError, AssertionError):
    """A rigorous inequality failed; signals a solver or discretization bug."""
