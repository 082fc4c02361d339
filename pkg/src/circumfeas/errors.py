"""Exception hierarchy shared by every module."""


class CircumfeasError(Exception):
    """Base class for all library errors."""


class DegenerateConfiguration(CircumfeasError):
    pass


class RankDeficient(CircumfeasError):
    pass


class InfeasibleSet(CircumfeasError):
    pass


class NumericalFailure(CircumfeasError):
    pass


class PointNotInSet(CircumfeasError):
    pass


class DimensionMismatch(CircumfeasError):
    pass


class OperatorUndefined(CircumfeasError):
    """The reflection operator cannot be evaluated at the current point.

    ``trace`` holds the iterations completed before the failure, when raised
    from one of the drivers.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class InPolarCone(CircumfeasError):
    pass


class CommonGreatCircle(CircumfeasError):
    pass


class AntipodalPair(CircumfeasError):
    pass


class NotProper(CircumfeasError):
    pass


class EmptyIntersection(CircumfeasError):
    pass


class CertificationFailed(CircumfeasError):
    pass
