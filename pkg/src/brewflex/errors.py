"""Exception hierarchy shared across the package."""


class BrewflexError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(BrewflexError):
    """Input data failed a structural or range check."""


class ParseError(ValidationError):
    """A file could not be parsed; carries file/line context in the message."""


class DomainError(BrewflexError):
    """An operation was called outside its mathematical/physical domain."""


class ConfigurationError(BrewflexError):
    """Scenario or population configuration is inconsistent."""


class CapacityError(BrewflexError):
    """Tank fleet exhausted; indicates a capacity-planning bug, not a runtime state."""


class InfeasibleError(BrewflexError):
    """No dispatch satisfies the temperature band constraints."""

    def __init__(self, message, first_violation_hour=None):
        super().__init__(message)
        self.first_violation_hour = first_violation_hour


class CalibrationError(ValidationError):
    """A plausibility bound on simulated results was breached; carries a report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or []
