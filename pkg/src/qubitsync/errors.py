"""Exception hierarchy shared by all modules."""


class QubitSyncError(Exception):
    """Base class for every error raised by this package."""


class DegenerateFrame(QubitSyncError):
    """Dressed basis undefined (zero detuning and zero drive)."""


class FrameMismatch(QubitSyncError):
    pass


class DomainError(QubitSyncError, ValueError):
    pass


class ValidationError(QubitSyncError, ValueError):
    pass


class ParseError(QubitSyncError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IntegrationFailure(QubitSyncError):
    pass


class ToleranceFailure(IntegrationFailure):
    """Step-size control could not meet the requested tolerances."""


class AliasingError(QubitSyncError):
    pass


class InsufficientData(QubitSyncError):
    pass


class PositivityWarning(UserWarning):
    """A sampled density matrix had an eigenvalue below the reporting threshold."""
