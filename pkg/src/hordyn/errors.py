"""Exception types raised across the package."""


class HordynError(Exception):
    """Base class for all package errors."""


class DomainError(HordynError, ValueError):
    """Input outside the domain of an operation (non-finite, wrong size, ...)."""


class UnsupportedError(HordynError, ValueError):
    """Input is valid but not supported, e.g. a non strictly proper system."""


class GameError(HordynError):
    """Payoff evaluation failed or returned something unusable."""


class NoInteriorNashError(GameError):
    """The bordered Nash system is singular: no unique interior candidate."""


class BoundaryNashError(GameError):
    """The unique Nash candidate has a non-positive component."""


class IntegrationError(HordynError):
    """ODE integration failed. ``t_last`` is the last time with a valid state."""

    def __init__(self, message, t_last=None, state=None):
        super().__init__(message)
        self.t_last = t_last
        self.state = state


class ConvergenceError(HordynError):
    """An iterative procedure did not reach its tolerance."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = list(residuals) if residuals is not None else []
