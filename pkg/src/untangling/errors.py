"""Exception types shared across the package."""


class UntanglingError(Exception):
    """Base class for every error raised by this package."""


class NonInvolutiveTwin(UntanglingError):
    pass


class DisconnectedMap(UntanglingError):
    pass


class EulerMismatch(UntanglingError):
    pass


class NotASpanningForest(UntanglingError):
    pass


class NotATriangulation(UntanglingError):
    pass


class DualNotBipartite(UntanglingError):
    pass


class DegreeBelowEight(UntanglingError):
    pass


class GenusTooSmall(UntanglingError):
    pass


class NotIncident(UntanglingError):
    pass


class EmptyWalk(UntanglingError):
    pass


class ContractibleInput(UntanglingError):
    pass


class OverlapViolation(UntanglingError):
    pass


class ExplorationBudgetExceeded(UntanglingError):
    pass


class NoGroupModel(UntanglingError):
    pass


class ForeignKey(UntanglingError):
    pass


class HostNotReducing(UntanglingError):
    pass


class HostNotTorusSchema(UntanglingError):
    pass


class HostNotLoopSystem(UntanglingError):
    pass


class MalformedDrawing(UntanglingError):
    pass


class BudgetExceeded(UntanglingError):
    pass


class WrongGenus(UntanglingError):
    pass


class HasBoundary(UntanglingError):
    pass


class NoBoundary(UntanglingError):
    pass


class ObstacleOnDrawing(UntanglingError):
    pass


class UnsupportedNoObstacles(UntanglingError):
    pass


class MalformedPolyline(UntanglingError):
    pass


class NotSparse(UntanglingError):
    pass


class UnsupportedSurface(UntanglingError):
    pass


class ParseError(UntanglingError):
    """Raised by the text parsers; carries a 1-based line and column."""

    def __init__(self, message, line=0, column=0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")
