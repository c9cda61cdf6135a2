"""Exception hierarchy shared by all solvers."""


class ConsLabError(Exception):
    """Base class for every error raised by the package."""


class NonMonotoneEta(ConsLabError):
    pass


class NonFinite(ConsLabError):
    pass


class OutOfDomain(ConsLabError):
    pass


class OutOfRange(ConsLabError):
    pass


class NotBracketed(ConsLabError):
    pass


class NotConvex(ConsLabError):
    pass


class DegenerateStates(ConsLabError):
    pass


class NonPositiveWeight(ConsLabError):
    pass


class DomainEscape(ConsLabError):
    pass


class NonFiniteFunctional(ConsLabError):
    pass


class NotConvexInitial(ConsLabError):
    pass


class NoCharacteristicHits(ConsLabError):
    pass


class NotMonotoneData(ConsLabError):
    pass


class UnstableConfig(ConsLabError):
    pass


class RangeEscape(ConsLabError):
    pass


class CflViolated(ConsLabError):
    pass


class WrongWindDirection(ConsLabError):
    pass


class InsufficientRuns(ConsLabError):
    pass


class SupportEscape(ConsLabError):
    pass


class OutOfInterval(ConsLabError):
    pass


class GridMismatch(ConsLabError):
    pass


class DegenerateFit(ConsLabError):
    pass


class ConfigError(ConsLabError):
    pass
