class UndefinedMeanError(ValueError):
    """Circular mean requested for a sample whose resultant vanishes."""


class DegenerateVarianceError(ArithmeticError):
    """Estimated variance of a statistic is numerically zero."""


class SingularCovarianceError(ArithmeticError):
    """Estimated covariance matrix cannot be safely inverted."""


class ConfigError(ValueError):
    """Invalid benchmark configuration; the message starts with the key path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class ReplicateError(RuntimeError):
    """A sampler or test failed inside one Monte Carlo replicate.

    The original exception is chained as ``__cause__``.
    """

    def __init__(self, param: float, replicate: int, stage: str, cause: BaseException):
        self.param = param
        self.replicate = replicate
        self.stage = stage
        super().__init__(f"{stage} replicate {replicate} at dependence {param:g}: {type(cause).__name__}: {cause}")
