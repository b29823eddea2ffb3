"""Exception hierarchy shared by all analysis modules."""


class SpotstatError(Exception):
    """Base class for all errors raised by spotstat."""


class ValidationError(SpotstatError, ValueError):
    """Invalid input data, parameters or configuration."""


class DegenerateDataError(ValidationError):
    """Input has no spread where spread is required (zero variance, single value)."""


class NumericalError(SpotstatError, RuntimeError):
    """A numerical procedure failed to produce a result."""


class FitError(NumericalError):
    """Maximum-likelihood optimisation did not converge.

    Attributes
    ----------
    best_params : dict or None
        Best parameters found across all starts.
    best_log_likelihood : float
        Log-likelihood at ``best_params``.
    """

    def __init__(self, message, best_params=None, best_log_likelihood=float("nan")):
        super().__init__(message)
        self.best_params = best_params
        self.best_log_likelihood = best_log_likelihood
