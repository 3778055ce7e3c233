"""
Error handling system for relscat.

This module provides the exception hierarchy raised by the numerical modules
and the ErrorHandler class that centralizes error reporting for experiment
runs.
"""

import logging
from enum import Enum
from typing import Any, Dict, Optional


class RelscatError(Exception):
    """Base exception for relscat errors."""

    pass


class DomainError(RelscatError, ValueError):
    """Raised when an argument lies outside an operation's domain."""

    pass


class ConfigError(RelscatError):
    """Raised when a configuration is invalid."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ShapeError(RelscatError, ValueError):
    """Raised when fields and grids do not match."""

    pass


class AssemblyError(RelscatError):
    """Raised when a kernel cannot be discretized on the requested grid."""

    pass


class ResourceError(RelscatError):
    """Raised when a dense object would exceed the configured size limit."""

    def __init__(self, message: str, hint: Optional[str] = None):
        self.hint = hint
        if hint:
            message = f"{message} ({hint})"
        super().__init__(message)


class ThresholdError(RelscatError):
    """Raised when 1 + A is singular within tolerance (eigenvalue or threshold hit)."""

    def __init__(
        self,
        message: str,
        smallest_singular_value: float,
        energy: Optional[float] = None,
    ):
        self.smallest_singular_value = smallest_singular_value
        self.energy = energy
        super().__init__(f"{message} (smallest singular value {smallest_singular_value:.3e})")


class NumericalError(RelscatError):
    """Raised when an iterative numerical method fails to converge."""

    def __init__(self, message: str, partial: Optional[Any] = None):
        self.partial = partial
        super().__init__(message)


class FitError(RelscatError):
    """Raised when a log-log exponent fit is degenerate."""

    pass


class UnsupportedKindError(RelscatError):
    """Raised when an operation is not available for a potential or kernel kind."""

    pass


class ErrorSeverity(Enum):
    """Enumeration of error severity levels."""

    INFO = "info"
    WARNING = "warning"
    ERROR = "error"
    CRITICAL = "critical"


class ErrorCategory(Enum):
    """Enumeration of error categories."""

    NUMERIC = "numeric"
    CONFIG = "config"
    DOMAIN = "domain"
    RESOURCE = "resource"
    THRESHOLD = "threshold"
    IO = "io"
    SYSTEM = "system"
    UNKNOWN = "unknown"


def categorize(exception: BaseException) -> ErrorCategory:
    """
    Map an exception to its error category.

    Args:
        exception: Exception to classify

    Returns:
        Matching ErrorCategory
    """
    if isinstance(exception, ConfigError):
        return ErrorCategory.CONFIG
    if isinstance(exception, ThresholdError):
        return ErrorCategory.THRESHOLD
    if isinstance(exception, ResourceError):
        return ErrorCategory.RESOURCE
    if isinstance(exception, (DomainError, ShapeError, UnsupportedKindError)):
        return ErrorCategory.DOMAIN
    if isinstance(exception, (NumericalError, FitError, AssemblyError)):
        return ErrorCategory.NUMERIC
    if isinstance(exception, OSError):
        return ErrorCategory.IO
    return ErrorCategory.UNKNOWN


class ErrorContext:
    """
    Context information for an error.

    Provides structured information about an error including its source,
    severity, category, and related data.
    """

    def __init__(
        self,
        message: str,
        exception: Optional[BaseException] = None,
        severity: ErrorSeverity = ErrorSeverity.ERROR,
        category: ErrorCategory = ErrorCategory.UNKNOWN,
        source: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
        suggestion: Optional[str] = None,
    ):
        """
        Initialize error context.

        Args:
            message: Human-readable error message
            exception: Original exception (optional)
            severity: Error severity level
            category: Error category
            source: Source component of the error
            details: Additional error details
            suggestion: Suggested action to resolve the error
        """
        self.message = message
        self.exception = exception
        self.severity = severity
        self.category = category
        self.source = source
        self.details = details or {}
        self.suggestion = suggestion


class ErrorHandler:
    """
    Centralized error handling for relscat runs.

    Logs errors with their category and the details each error type carries.
    """

    def __init__(self) -> None:
        """Initialize the error handler."""
        self.logger = logging.getLogger("relscat.core.error_handler")

    def handle_error(
        self,
        message: str,
        exception: Optional[BaseException] = None,
        severity: ErrorSeverity = ErrorSeverity.ERROR,
        category: Optional[ErrorCategory] = None,
        source: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
        suggestion: Optional[str] = None,
    ) -> ErrorContext:
        """
        Log an error and return its context.

        Args:
            message: Human-readable error message
            exception: Original exception (optional)
            severity: Error severity level
            category: Error category (derived from the exception when omitted)
            source: Source component of the error
            details: Additional error details
            suggestion: Suggested action to resolve the error

        Returns:
            ErrorContext object for the handled error
        """
        if category is None:
            category = categorize(exception) if exception else ErrorCategory.UNKNOWN

        error_context = ErrorContext(
            message=message,
            exception=exception,
            severity=severity,
            category=category,
            source=source,
            details=details,
            suggestion=suggestion,
        )

        self._log_error(error_context)

        return error_context

    def _log_error(self, error_context: ErrorContext) -> None:
        """
        Log an error with appropriate severity level.

        Args:
            error_context: Error context to log
        """
        log_message = f"{error_context.message}"
        if error_context.source:
            log_message = f"[{error_context.source}] {log_message}"

        if error_context.exception:
            log_message = f"{log_message}: {error_context.exception}"

        if error_context.severity == ErrorSeverity.INFO:
            self.logger.info(log_message)
        elif error_context.severity == ErrorSeverity.WARNING:
            self.logger.warning(log_message)
        elif error_context.severity == ErrorSeverity.CRITICAL:
            self.logger.critical(log_message)
        else:
            self.logger.error(log_message)
        if error_context.suggestion:
            self.logger.info(f"Suggestion: {error_context.suggestion}")

    # Convenience methods for common error types

    def handle_numeric_error(
        self,
        message: str,
        exception: Optional[BaseException] = None,
        operation: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
        severity: ErrorSeverity = ErrorSeverity.ERROR,
    ) -> ErrorContext:
        """
        Handle an error raised by a numerical operation.

        Args:
            message: Error message
            exception: Original exception (optional)
            operation: Name of the numerical operation
            details: Additional error details
            severity: Error severity level

        Returns:
            ErrorContext object for the handled error
        """
        details_dict = dict(details or {})
        suggestion = None
        if isinstance(exception, ThresholdError):
            details_dict["smallest_singular_value"] = exception.smallest_singular_value
            if exception.energy is not None:
                details_dict["energy"] = exception.energy
            suggestion = "Move the coupling or energy away from the threshold."
        elif isinstance(exception, ResourceError):
            suggestion = exception.hint
        elif isinstance(exception, NumericalError) and exception.partial is not None:
            details_dict["partial"] = exception.partial

        return self.handle_error(
            message=message,
            exception=exception,
            severity=severity,
            source=f"Operation: {operation}" if operation else "Numerics",
            details=details_dict,
            suggestion=suggestion,
        )

    def handle_config_error(
        self,
        message: str,
        exception: Optional[BaseException] = None,
        config_file: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
        suggestion: Optional[str] = None,
        severity: ErrorSeverity = ErrorSeverity.ERROR,
    ) -> ErrorContext:
        """
        Handle a configuration-related error.

        Args:
            message: Error message
            exception: Original exception (optional)
            config_file: Configuration file path
            details: Additional error details
            suggestion: Suggested action to resolve the error
            severity: Error severity level

        Returns:
            ErrorContext object for the handled error
        """
        details_dict = dict(details or {})
        if config_file:
            details_dict["config_file"] = config_file
        if isinstance(exception, ConfigError) and exception.line is not None:
            details_dict["line"] = exception.line

        return self.handle_error(
            message=message,
            exception=exception,
            severity=severity,
            category=ErrorCategory.CONFIG,
            source="Configuration",
            details=details_dict,
            suggestion=suggestion,
        )

    def handle_io_error(
        self,
        message: str,
        exception: Optional[BaseException] = None,
        path: Optional[str] = None,
        severity: ErrorSeverity = ErrorSeverity.ERROR,
    ) -> ErrorContext:
        """
        Handle a file input/output error.

        Args:
            message: Error message
            exception: Original exception (optional)
            path: File path involved
            severity: Error severity level

        Returns:
            ErrorContext object for the handled error
        """
        return self.handle_error(
            message=message,
            exception=exception,
            severity=severity,
            category=ErrorCategory.IO,
            source="IO",
            details={"path": path} if path else None,
            suggestion="Check that the path exists and is writable.",
        )


# Global error handler instance
_error_handler: Optional[ErrorHandler] = None


def get_error_handler() -> ErrorHandler:
    """
    Get the global error handler instance.

    Returns:
        ErrorHandler instance
    """
    global _error_handler
    if _error_handler is None:
        _error_handler = ErrorHandler()
    return _error_handler
