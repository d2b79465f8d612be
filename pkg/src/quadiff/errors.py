"""Exception hierarchy shared by all modules."""


class QuadiffError(Exception):
    """Base class for every error raised by quadiff."""


class NumericalError(QuadiffError):
    """A numerical procedure failed; usually a tolerance problem."""


class NonConvergence(NumericalError):
    pass


class StepCollapse(NumericalError):
    pass


class PathTooClose(NumericalError):
    pass


class DegeneratePeriod(NumericalError):
    pass


class PairingFailure(NumericalError):
    pass


class SeedTooCritical(QuadiffError):
    pass


class BranchCut(QuadiffError):
    pass


class WrongOrder(QuadiffError):
    pass


class InvalidConfiguration(QuadiffError):
    pass


class InconsistentDivisor(QuadiffError):
    pass


class InvalidScheme(QuadiffError):
    pass


class InvalidPeriods(QuadiffError):
    pass


class SaddlePresent(QuadiffError):
    """A separatrix ends on a zero at the working phase.

    The offending :class:`~quadiff.separatrix.SaddleEvent` is kept on
    ``self.event``.
    """

    def __init__(self, event, message=None):
        self.event = event
        super().__init__(message or f"saddle trajectory present: {event}")


class RingDomainSuspected(QuadiffError):
    pass
