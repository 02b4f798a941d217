"""Exception types shared across the package."""


class InfeasibleError(ValueError):
    """A construction cannot proceed (too many interpolation points, etc.)."""


class InvalidWitnessError(ValueError):
    """A candidate witness fails its vanishing requirement."""


class UnsupportedRangeError(ValueError):
    """Parameters fall outside the range a statement is proved for."""


class ConfigError(ValueError):
    """Experiment configuration is malformed."""
