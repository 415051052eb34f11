"""
Exception hierarchy shared by every module.

The CLI maps any EngineError to exit code 2.
"""
from typing import Optional, Tuple


class EngineError(Exception):
    """Base class for every failure raised by the engine."""


class ContextMismatchError(EngineError):
    pass


class NotDivisibleError(EngineError):
    """Exact division failed; upstream Weyl action or data is wrong."""


class SeriesError(EngineError):
    pass


class CartanTypeError(EngineError):
    pass


class ResourceLimitError(EngineError):
    pass


class ModelParseError(EngineError):
    def __init__(self, message: str, line_no: Optional[int] = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class ModelValidationError(EngineError):
    def __init__(self, message: str, witness: Tuple[str, ...] = ()):
        self.witness = tuple(witness)
        if self.witness:
            message = f"{message} (witness: {', '.join(self.witness)})"
        super().__init__(message)


class HypothesisError(EngineError):
    pass


class CalibrationError(EngineError):
    pass
