"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class ConfigError(ValueError):
    """Experiment configuration could not be parsed or validated."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance.

    The best available estimate is kept in ``partial_value``.
    """

    def __init__(self, message, partial_value=float("nan"), abserr=float("nan")):
        super().__init__(message)
        self.partial_value = partial_value
        self.abserr = abserr


class InfeasibleError(RuntimeError):
    """No parameter in the admissible range satisfies the required inequality."""


class TruncatedDomainError(RuntimeError):
    """An ODE trajectory left the representable range before the end of the interval."""

    def __init__(self, message, reached_x):
        super().__init__(message)
        self.reached_x = reached_x
