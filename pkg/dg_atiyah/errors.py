"""Exception hierarchy -- every engine failure carries the exit code the CLI reports."""

from typing import Optional, Sequence

EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_INTERNAL = 70


class EngineError(Exception):
    exit_code = EXIT_INTERNAL


class StructuralError(EngineError, ValueError):
    """Variable lists, dimensions or indices do not line up."""

    exit_code = EXIT_DATA


class ExpressionSyntaxError(EngineError, ValueError):
    exit_code = EXIT_DATA

    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.line = line
        self.column = column
        self.reason = message
        super().__init__(f"line {line}, column {column}: {message}")


class UnknownVariableError(ExpressionSyntaxError):
    pass


class ProblemFileError(EngineError):
    exit_code = EXIT_DATA

    def __init__(self, message: str, location: str = "", source: Optional[str] = None):
        self.location = location
        self.source = source
        self.reason = message
        prefix = ": ".join(part for part in (source, location) if part)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ValidationError(EngineError, ValueError):
    exit_code = EXIT_DATA


class InvalidConnectionError(ValidationError):
    def __init__(self, violations: Sequence):
        self.violations = list(violations)
        listed = "; ".join(str(v) for v in self.violations[:5])
        more = f" (+{len(self.violations) - 5} more)" if len(self.violations) > 5 else ""
        super().__init__(f"invalid connection triple: {listed}{more}")


class WitnessValidationError(ValidationError):
    def __init__(self, failures: Sequence):
        self.failures = list(failures)
        super().__init__("zero-locus witness rejected: " + "; ".join(str(f) for f in self.failures))


class MissingWitnessError(ValidationError):
    pass


class ConfigError(EngineError):
    exit_code = EXIT_USAGE


class InternalError(EngineError):
    exit_code = EXIT_INTERNAL
