"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A requested configuration is invalid or infeasible (bad sizes,
    unsupported variants, malformed config files)."""


class InvalidGateError(ValueError):
    """A gate application is malformed: duplicate or out-of-range qubit
    indices, missing parameters, unknown kind."""


class DegenerateSpectrumError(ValueError):
    """The energy spectrum is constant, so ratio-based metrics are undefined."""


class OptimizationError(RuntimeError):
    """The parameter optimizer hit a non-finite objective value or another
    unrecoverable numerical condition."""
