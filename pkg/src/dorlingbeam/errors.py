"""Exception types shared across the pipeline."""


class CartogramError(Exception):
    """Base class for all errors raised by this package."""


class DatasetError(CartogramError):
    """Input file or region data is unusable."""


class ConfigError(CartogramError, ValueError):
    """A configuration value violates its documented range."""


class SolverError(CartogramError):
    """The beam system could not be solved.

    ``iteration`` names the engine step (if known); ``trace`` carries the
    iteration records accumulated before the failure.
    """

    def __init__(self, message, iteration=None, trace=None):
        super().__init__(message)
        self.iteration = iteration
        self.trace = list(trace) if trace is not None else []
