"""Exception hierarchy shared by the solver, the bench harness and the API."""


class SchedulingError(Exception):
    """Base class for every error raised by this package."""


class InstanceError(SchedulingError, ValueError):
    """Problem data that cannot form a valid job-shop instance."""


class ParseError(InstanceError):
    """Malformed instance text; remembers where the problem was found."""

    def __init__(self, message: str, line: int, column: int = 1) -> None:
        self.line = line
        self.column = column
        self.reason = message
        super().__init__(f"line {line}, column {column}: {message}")


class SolutionError(SchedulingError, ValueError):
    """A machine permutation that does not fit its instance."""


class ContractViolation(SchedulingError, ValueError):
    """A caller broke a documented precondition."""


class BudgetExhaustedError(SchedulingError):
    """The time budget ran out before the population could be built."""


class ManifestError(SchedulingError):
    """Malformed bench manifest or a missing instance file."""
