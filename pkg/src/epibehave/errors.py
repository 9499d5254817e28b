"""Exception types raised by the numerical routines."""


class EpibehaveError(Exception):
    """Base class; the CLI maps these to exit status 3."""


class NonFiniteState(EpibehaveError):
    pass


class ConservationViolation(EpibehaveError):
    pass


class MultiplePeaks(EpibehaveError):
    pass


class NoTakeoff(EpibehaveError):
    pass


class NoThreshold(EpibehaveError):
    pass


class NoPeak(EpibehaveError):
    pass


class BracketFailure(EpibehaveError):
    def __init__(self, message: str, **diagnostics: float) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics


class DomainError(EpibehaveError, ValueError):
    pass


class AssumptionViolated(EpibehaveError):
    pass


class NoConvergence(EpibehaveError):
    def __init__(self, message: str, gap_history: list[float]) -> None:
        super().__init__(message)
        self.gap_history = gap_history


class ExposureOutOfRange(EpibehaveError):
    pass


class IdentityViolation(EpibehaveError):
    pass


class SandwichViolation(EpibehaveError):
    def __init__(self, message: str, s: float) -> None:
        super().__init__(message)
        self.s = s


class EmptySeries(EpibehaveError, ValueError):
    pass
