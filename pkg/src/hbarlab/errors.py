"""Exception types raised across the package."""


class HbarLabError(Exception):
    """Base class for all errors raised by hbarlab."""


class DegenerateValue(HbarLabError):
    """A sampled loop came closer to zero than the degeneracy floor."""


class Undersampled(HbarLabError):
    """Argument jumps too large to unwrap unambiguously."""


class QuadratureFailure(HbarLabError):
    pass


class Infeasible(HbarLabError):
    pass


class DomainError(HbarLabError, ValueError):
    pass


class OutOfChart(DomainError):
    pass


class NotOnLevelSet(DomainError):
    pass


class OutOfDisk(DomainError):
    pass


class CurveTooLarge(DomainError):
    pass


class CurveHitsOrigin(DomainError):
    pass


class BadBasePoint(DomainError):
    pass


class DegenerateFrame(HbarLabError):
    pass


class BoundaryTouchesDivisor(HbarLabError):
    pass


class NotAZero(DomainError):
    pass


class ParameterOutOfRange(DomainError):
    pass


class OutOfPolytope(DomainError):
    pass


class StepFailure(HbarLabError):
    pass


class ChartMismatch(HbarLabError):
    """Swap slots both lie inside the chart, so the swap preserves the torus."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DoesNotFit(HbarLabError):
    def __init__(self, message, max_feasible_a=None):
        super().__init__(message)
        self.max_feasible_a = max_feasible_a
