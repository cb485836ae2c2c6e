"""Exception hierarchy shared by all solver modules."""


class DuctMocError(Exception):
    """Base class for solver errors."""


class NonPhysical(DuctMocError, ValueError):
    pass


class NonSupersonic(DuctMocError, ValueError):
    pass


class InvalidParameter(DuctMocError, ValueError):
    pass


class OutOfDomain(DuctMocError, ValueError):
    pass


class OutOfRange(DuctMocError, ValueError):
    pass


class OutOfRegion(DuctMocError, ValueError):
    pass


class ProfileViolation(DuctMocError, ValueError):
    def __init__(self, clause: str, message: str):
        super().__init__(f"({clause}) {message}")
        self.clause = clause


class KernelError(DuctMocError):
    """A unit process could not produce a node."""


class NoIntersection(KernelError):
    pass


class CorrectorDiverged(KernelError):
    pass


class VacuumReached(KernelError):
    pass


class NoWallHit(KernelError):
    pass


class FootOutsideFront(KernelError):
    pass


class CaseTwoDetected(DuctMocError):
    """The cross characteristic through P does not reach the wall."""


class StationOutsideGas(DuctMocError, ValueError):
    pass


class RegionOpen(DuctMocError):
    pass
