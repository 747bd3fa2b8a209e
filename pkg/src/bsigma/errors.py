"""Exception types shared across the lab."""


class LabError(Exception):
    """Base class for every error raised by this package."""


class DomainKindMismatch(LabError):
    pass


class BudgetExhausted(LabError):
    """A bounded computation ran out of steps before committing its outputs.

    This is never a claim that the computation diverges.
    """


class MachineTimeout(BudgetExhausted):
    pass


class UnknownIndex(LabError, KeyError):
    pass


class SolutionError(LabError, TypeError):
    """A solution payload does not match its declared variant."""


class FixtureError(LabError):
    """A spoiler disagrees with the instance it is attached to.

    Raised whenever ground truth turns out to be inconsistent; it always
    indicates a broken test fixture, never a broken reduction.
    """


class UnsupportedLevel(LabError, ValueError):
    pass


class InvalidParams(LabError, ValueError):
    pass


class MalformedCandidate(LabError, ValueError):
    pass


class UnknownReduction(LabError, KeyError):
    pass
