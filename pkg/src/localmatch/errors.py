"""Exception types shared across the package.

Exit-code mapping used by the CLI: validation violations exit with 2,
budget/resource problems with 3.
"""


class LocalMatchError(Exception):
    """Base class for all package errors."""


class GraphFormatError(LocalMatchError):
    """Malformed graph file. Carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownVertexError(LocalMatchError):
    """A probe named a vertex that does not exist (malformed caller)."""


class BudgetExceededError(LocalMatchError):
    """A probe left the configured radius budget. Signals an analysis bug."""


class CorruptedOrientationError(LocalMatchError):
    """A directed cycle was met while walking a supposedly acyclic orientation."""


class SimulationSoundnessError(LocalMatchError):
    """A simulated probe left the collected ball: the claimed radius bound is wrong."""


class ResourceCapError(LocalMatchError):
    """A configured desk-scale cap was exceeded (ladder size, instance size, overflow)."""


class SpecError(LocalMatchError):
    """An infeasible or malformed corpus/experiment specification."""
