"""Errors raised by the Mittag-Leffler engine"""


class MlfDomainError(ValueError):
    """Argument outside the supported domain (non-finite, alpha <= 0, large positive z)"""


class MlfAccuracyError(ArithmeticError):
    """The requested tolerance could not be certified

    Carries both candidate values so callers can report the disagreement.
    """

    def __init__(self, message: str, series_value: float = float("nan"), asymptotic_value: float = float("nan")):
        super().__init__(message)
        self.series_value = series_value
        self.asymptotic_value = asymptotic_value
