"""Exception hierarchy shared by the solver modules."""


class WgqedError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(WgqedError, ValueError):
    """A physical or numerical parameter is outside its allowed range."""


class ResolutionError(WgqedError, ValueError):
    """The time grid is too coarse for the rates involved."""


class ContractError(WgqedError, ValueError):
    """Inputs do not fit together (e.g. correlators on a different grid)."""


class GridCoverageError(ContractError):
    """A requested time lies outside the grid the correlators were solved on."""


class AccuracyError(WgqedError, ArithmeticError):
    """A quadrature failed its grid-refinement self check."""


class ConvergenceError(WgqedError, ArithmeticError):
    """The discretized-continuum reference did not converge."""
