"""Exception hierarchy and process exit codes."""
from __future__ import annotations

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_STAGE_FAILURE = 3
EXIT_BACKEND_FAILURE = 4


class DesignGenError(Exception):
    """Base class for all pipeline errors."""

    exit_code = EXIT_INPUT_ERROR


class InputError(DesignGenError):
    """Bad user-supplied input (files, config, arguments)."""

    exit_code = EXIT_INPUT_ERROR


class MalformedSyntax(InputError):
    """Input bytes are not parseable at all."""


class SchemaViolation(InputError):
    """Parsed input violates the schema; carries the offending field path."""

    def __init__(self, path: str, reason: str = ""):
        self.path = path
        self.reason = reason
        msg = path if not reason else f"{path}: {reason}"
        super().__init__(msg)


class MalformedBenchmark(InputError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class ConfigError(InputError):
    pass


class MissingAsset(InputError):
    def __init__(self, source_id: str):
        self.source_id = source_id
        super().__init__(f"asset not found: {source_id}")


class EmptyInput(InputError):
    pass


class InsufficientExemplars(InputError):
    pass


class ModelOutputError(DesignGenError):
    """A model reply could not be turned into a valid value; caller should retry."""

    exit_code = EXIT_STAGE_FAILURE


class NoJsonFound(ModelOutputError):
    pass


class InvalidPlan(ModelOutputError):
    pass


class InvalidTypography(ModelOutputError):
    def __init__(self, path: str, reason: str = ""):
        self.path = path
        msg = path if not reason else f"{path}: {reason}"
        super().__init__(msg)


class InvalidScores(ModelOutputError):
    pass


class MissingFragment(DesignGenError):
    exit_code = EXIT_STAGE_FAILURE

    def __init__(self, kind: str):
        self.kind = kind
        super().__init__(f"missing plan fragment: {kind}")


class GenerationExhausted(DesignGenError):
    """All retry attempts failed; carries the last parse/validation error."""

    exit_code = EXIT_STAGE_FAILURE

    def __init__(self, attempts: int, last_error: Exception | None = None):
        self.attempts = attempts
        self.last_error = last_error
        detail = f": {last_error}" if last_error is not None else ""
        super().__init__(f"gave up after {attempts} attempt(s){detail}")


class UnsatisfiablePrompt(DesignGenError):
    exit_code = EXIT_STAGE_FAILURE


class BackendFailure(DesignGenError):
    """A model service call failed; carries request context for diagnosis."""

    exit_code = EXIT_BACKEND_FAILURE

    def __init__(self, context: str, cause: Exception | None = None):
        self.context = context
        self.cause = cause
        detail = f" ({cause})" if cause is not None else ""
        super().__init__(f"{context}{detail}")


class StageFailure(DesignGenError):
    exit_code = EXIT_STAGE_FAILURE

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
        if isinstance(cause, BackendFailure):
            self.exit_code = EXIT_BACKEND_FAILURE
