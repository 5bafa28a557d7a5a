"""Exception types shared across the toolkit."""


class InvalidInput(ValueError):
    """Raised for malformed inputs: dimension mismatches, empty points, bad ranges."""


class InvalidConfig(ValueError):
    """Raised when a solver/certificate configuration is internally inconsistent."""


class ConfigError(InvalidConfig):
    """CLI-facing configuration error (unknown problem, bad flag combination)."""


class EvaluationError(RuntimeError):
    """A user-supplied function produced a non-finite or malformed value.

    The offending input is kept on ``offending_input`` for witness reporting.
    """

    def __init__(self, message, offending_input=None):
        super().__init__(message)
        self.offending_input = offending_input


class NoRootBracketed(ValueError):
    """Bisection interval does not bracket a root of f(x) - x."""


class InverseError(RuntimeError):
    """The supplied inverse of S failed a consistency check during iteration.

    ``iteration`` records the 1-based iteration at which the check failed.
    """

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration
