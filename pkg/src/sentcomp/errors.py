"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Bad user-supplied configuration or input data."""


class GrammarError(ValueError):
    """Malformed grammar file or production."""


class DecodeError(ValueError):
    """Solution vector is not binary within tolerance."""


class IntegrityError(ValueError):
    """Context variables disagree with the selected words."""


class InfeasibleError(RuntimeError):
    """The feasible region is empty."""
