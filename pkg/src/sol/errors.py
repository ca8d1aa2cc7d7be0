"""Exception types shared across the library."""


class SolError(Exception):
    """Base class for all library errors."""


class ConfigError(SolError):
    """Invalid algorithm name, hyperparameter, or option combination."""


class FormatError(SolError):
    """Structurally invalid data (bad magic, malformed vector, bad header)."""


class ParseError(FormatError):
    """Malformed text input, positioned at a line or row number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class CorruptionError(FormatError):
    """Damaged binary input, positioned at a byte offset."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ModelFormatError(FormatError):
    """Unreadable or inconsistent model file."""


class EvaluationError(SolError):
    """Test data incompatible with the model being evaluated."""
