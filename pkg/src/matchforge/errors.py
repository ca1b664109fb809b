class MatchforgeError(Exception):
    """Base class for library errors."""


class InstanceError(MatchforgeError, ValueError):
    """An instance violates the schema or a model invariant.

    ``field`` names the offending JSON field (dotted path).
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class DomainError(MatchforgeError, ValueError):
    """A contract set is not contained in the ground set it is applied to."""


class GuardError(MatchforgeError, RuntimeError):
    """An exhaustive enumeration would exceed its configured limit."""


class ContractViolation(MatchforgeError, RuntimeError):
    """A choice function returned a set that is not a subset of its input."""

    def __init__(self, message, step=None):
        super().__init__(message if step is None else f"step {step}: {message}")
        self.step = step


class SpecError(MatchforgeError, ValueError):
    """Institution data does not meet a choice rule's precondition."""
