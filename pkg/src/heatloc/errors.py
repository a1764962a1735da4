"""Exception and warning types shared across the package."""

from __future__ import annotations


class HeatlocError(Exception):
    """Base class for all package errors."""


class InvalidSpec(HeatlocError, ValueError):
    """A parameter violates its documented constraint."""

    def __init__(self, param: str, message: str):
        self.param = param
        super().__init__(f"{param}: {message}")


class GeometryDegenerate(HeatlocError, ValueError):
    pass


class TooCoarse(HeatlocError, ValueError):
    pass


class MaskMismatch(HeatlocError, ValueError):
    pass


class EmptyIndicator(HeatlocError, ValueError):
    pass


class NoInteriorCells(HeatlocError, ValueError):
    pass


class KExceedsN(HeatlocError, ValueError):
    pass


class TooLargeForDense(HeatlocError, ValueError):
    pass


class InsufficientModes(HeatlocError, ValueError):
    pass


class NonPositiveTime(HeatlocError, ValueError):
    pass


class TruncationTooSevere(HeatlocError, ValueError):
    pass


class NumericalFailure(HeatlocError, RuntimeError):
    """Base for failures of a numerical procedure (CLI exit code 3)."""


class NoConvergence(NumericalFailure):
    def __init__(self, message: str, residuals=None, iterations: int = 0):
        self.residuals = residuals
        self.iterations = iterations
        super().__init__(message)


class WalkRunaway(NumericalFailure):
    pass


class ThinFeatureWarning(UserWarning):
    """A thin geometric feature spans fewer than two grid cells."""


class NeckPinchOff(HeatlocError, ValueError):
    """A disk-chain neck did not survive rasterization as a connection."""


class NeckPinchOffWarning(UserWarning):
    pass
