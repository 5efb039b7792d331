"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Input is malformed (wrong shape, non-finite entries, out-of-range size)."""


class DomainError(ValueError):
    """Argument lies outside the mathematical domain of an operation."""


class DegenerateDesignError(DomainError):
    """A combiner design produces a singular noise covariance."""


class ConfigurationError(ValueError):
    """Experiment or solver configuration is invalid."""
