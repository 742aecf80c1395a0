"""Exception hierarchy shared by the library and the command line."""


class MandelDdeError(Exception):
    """Base class for all domain errors raised by this package."""


class NoConvergence(MandelDdeError):
    pass


class DegenerateCycle(MandelDdeError):
    pass


class ContinuationStall(MandelDdeError):
    """Newton continuation failed part-way; ``partial`` holds the curve so far."""

    def __init__(self, message: str, partial: list[complex] | None = None):
        super().__init__(message)
        self.partial = list(partial or [])


class InconclusiveWinding(MandelDdeError):
    pass


class DivisionByZeroRay(MandelDdeError):
    pass


class TooFewPeaks(MandelDdeError):
    pass
