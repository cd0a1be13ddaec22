# 错误处理模块 - 异常层次结构与退出码映射

from enum import IntEnum
from typing import Any, Callable, List, Optional, Sequence

from src.logging_config import get_logger

logger = get_logger(__name__)


class ExitStatus(IntEnum):
    OK = 0
    CHECK_FAILED = 1
    INVALID_INPUT = 2
    RESOURCE_LIMIT = 3
    INTERNAL_ERROR = 4


class DeckitError(Exception):
    """所有库错误的基类；exit_status 是 CLI 映射到的退出码。"""

    exit_status = ExitStatus.INVALID_INPUT

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def at(self, line: int, column: int) -> "DeckitError":
        if self.line is None:
            self.line = line
            self.column = column
        return self

    def __str__(self) -> str:
        if self.line is not None:
            return f"{self.line}:{self.column}: {self.message}"
        return self.message


class FrontendError(DeckitError):
    exit_status = ExitStatus.INVALID_INPUT


class TheorySyntaxError(FrontendError):
    pass


class DuplicateName(FrontendError):
    pass


class UnknownProfile(FrontendError):
    pass


class UndeclaredName(FrontendError):
    def __init__(self, kind: str, name: str, **kwargs: Any):
        super().__init__(f"undeclared {kind} '{name}'", **kwargs)
        self.kind = kind
        self.name = name


class TypeMismatch(FrontendError):
    def __init__(self, expected: Any, actual: Any, path: Sequence[str], detail: str = ""):
        from src.frontend import pretty_type

        where = "/".join(path) if path else "<root>"
        message = (
            f"type mismatch at {where}: expected {pretty_type(expected)}, "
            f"got {pretty_type(actual)}"
        )
        if detail:
            message += f" ({detail})"
        super().__init__(message)
        self.expected = expected
        self.actual = actual
        self.path = tuple(path)


class EffectSideError(FrontendError):
    pass


class FormationError(FrontendError):
    def __init__(self, message: str, violations: Optional[List[Any]] = None):
        super().__init__(message)
        self.violations = list(violations or [])


class EmptyHandlerList(FrontendError):
    pass


class IncompleteConstTable(FrontendError):
    pass


class IllegalLift(FrontendError):
    pass


class NotAPropagator(FrontendError):
    pass


class DecorationMismatch(FrontendError):
    pass


class UnknownRule(FrontendError):
    pass


class UnknownWitness(FrontendError):
    pass


class ResourceError(DeckitError):
    exit_status = ExitStatus.RESOURCE_LIMIT


class CarrierTooLarge(ResourceError):
    pass


class EnumerationLimitExceeded(ResourceError):
    pass


class ErrorHandler:
    """CLI 的集中式错误处理器：记录上下文并映射退出码。"""

    def __init__(self, verbose: bool = False):
        self.verbose = verbose
        self.errors: List[BaseException] = []

    def handle(self, error: BaseException, context: str, operation: Optional[str] = None) -> ExitStatus:
        error_type = type(error).__name__
        log_parts = [
            f"Error in {context}",
            f"Error type: {error_type}",
            f"Error message: {error}",
        ]
        if operation:
            log_parts.insert(1, f"Operation: {operation}")

        if isinstance(error, ResourceError):
            self.errors.append(error)
            logger.warning(" | ".join(log_parts) + " | Resource cap exceeded")
            return error.exit_status
        if isinstance(error, DeckitError):
            self.errors.append(error)
            logger.error(" | ".join(log_parts))
            return error.exit_status

        self.errors.append(error)
        if isinstance(error, (OSError, UnicodeDecodeError)):
            logger.error(" | ".join(log_parts), exc_info=self.verbose)
            return ExitStatus.INVALID_INPUT

        logger.error(" | ".join(log_parts) + " | Unexpected error", exc_info=True)
        logger.debug(f"Full error details: {error!r}")
        return ExitStatus.INTERNAL_ERROR

    def run_guarded(self, operation_func: Callable[..., ExitStatus], operation_name: str,
                    *args: Any, **kwargs: Any) -> ExitStatus:
        try:
            logger.debug(f"Executing {operation_name}")
            return operation_func(*args, **kwargs)
        except DeckitError as e:
            return self.handle(e, context=operation_name)
        except (OSError, UnicodeDecodeError) as e:
            return self.handle(e, context=operation_name, operation="read input")
        except Exception as e:
            return self.handle(e, context=operation_name, operation="unexpected failure")
