"""Exception types raised by the estimators and the pipeline."""

from __future__ import annotations


class FixedKernError(Exception):
    """Base class for all package errors."""


class NumericalError(FixedKernError):
    """A computation was well posed but numerically degenerate."""


class InvalidBandwidthError(FixedKernError, ValueError):
    """Bandwidth outside its admissible range."""


class InvalidBandwidthRuleError(InvalidBandwidthError):
    """A bandwidth rule h(T) violates the admissibility condition."""


class SingularDesignError(NumericalError):
    """The 2x2 local-linear moment matrix is (near) singular at ``x``."""

    def __init__(self, x: float, det: float):
        self.x = float(x)
        self.det = float(det)
        super().__init__(
            f"singular local-linear design at x={self.x:.6g} (det={self.det:.3g}); "
            "bandwidth too small for this sample size"
        )


class DegenerateDenominatorError(NumericalError):
    """The local-constant denominator vanished at ``x``."""

    def __init__(self, x: float, value: float):
        self.x = float(x)
        self.value = float(value)
        super().__init__(
            f"degenerate denominator {self.value:.3g} at x={self.x:.6g}; "
            "residuals are (numerically) zero in the smoothing window"
        )


class InfeasibleBandwidthError(NumericalError):
    """Too many cross-validation centers lost their kernel window."""


class NoFeasibleBandwidthError(NumericalError):
    """Every candidate bandwidth was infeasible."""


class DegenerateSeriesError(NumericalError, ValueError):
    """A series has zero variance, so autocorrelations are undefined."""


class ConvergenceError(NumericalError):
    """Optimizer budget exhausted; ``best`` holds the best iterate found."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class InvalidParamsError(FixedKernError, ValueError):
    """Rate parameters inconsistent with the requested mode."""


class DataError(FixedKernError, ValueError):
    """Malformed input data (parse, missing values, irregular spacing)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
