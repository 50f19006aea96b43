"""Exception hierarchy. Every numerical failure derives from NumericalFailure so
batch runners can record it per cell and keep going."""


class CyclicvecError(Exception):
    pass


class SpecError(CyclicvecError, ValueError):
    """Malformed problem specification."""


class NumericalFailure(CyclicvecError, ArithmeticError):
    pass


class IndexOutOfTable(CyclicvecError, IndexError):
    pass


class IndexOutOfWindow(CyclicvecError, IndexError):
    pass


class NodeCollision(NumericalFailure):
    pass


class DivergentTail(NumericalFailure):
    pass


class ToleranceUnreachable(NumericalFailure):
    pass


class ZeroCoefficientInWindow(NumericalFailure):
    def __init__(self, index):
        super().__init__(f"coefficient (f, e_{index}) vanishes inside the window")
        self.index = index


class EmptySupport(NumericalFailure):
    pass


class SolveFailed(NumericalFailure):
    pass


class NotPSD(NumericalFailure):
    pass


class SingularGram(NumericalFailure):
    def __init__(self, message, condition_estimate=None):
        if condition_estimate is not None:
            message = f"{message} (condition estimate ~ {condition_estimate})"
        super().__init__(message)
        self.condition_estimate = condition_estimate


class GridTooCoarse(NumericalFailure):
    pass


class ZeroCoefficient(NumericalFailure):
    def __init__(self, index):
        super().__init__(f"Fourier coefficient at k={index} is zero")
        self.index = index


class NoZeroFound(NumericalFailure):
    pass


class DegenerateDenominatorWarning(RuntimeWarning):
    pass
