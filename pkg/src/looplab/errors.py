"""Exception hierarchy shared by all looplab modules."""


class LoopLabError(Exception):
    """Base class for every error raised by looplab."""


class InvalidParameterError(LoopLabError, ValueError):
    pass


class InvalidStructureError(LoopLabError, ValueError):
    pass


class MatchingParseError(LoopLabError, ValueError):
    pass


class DimensionError(LoopLabError, ValueError):
    pass


class SpecialCaseError(LoopLabError, ValueError):
    """Raised when a row pair is one of the two configurations V handles explicitly."""


class SingularParameterError(LoopLabError, ZeroDivisionError):
    pass


class DegenerateChainError(LoopLabError, ValueError):
    pass


class ResourceLimitError(LoopLabError):
    pass


class NonTerminationError(LoopLabError):
    """The frontier still had open strands after ``max_rows`` rows."""


class ScheduleRejectedError(LoopLabError, ValueError):
    pass
