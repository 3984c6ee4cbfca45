"""Exception hierarchy shared by all skelmetric modules."""


class SkelmetricError(Exception):
    """Base class for all package errors."""


class ShapeError(SkelmetricError):
    """Tensor dimensions are inconsistent with what an operation requires."""


class NumericError(SkelmetricError):
    """A computation produced or received non-finite values."""


class ValidationError(SkelmetricError):
    """An argument or configuration violates a documented precondition."""


class ParseError(SkelmetricError):
    """A data file could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SchemaError(SkelmetricError):
    """A data file parsed but its contents contradict the declared schema."""


class CheckpointError(SkelmetricError):
    """A model checkpoint is missing, corrupt, or of an unknown version."""
