"""
Logging system for relscat.

This module provides a centralized logging setup with configurable log
levels, rotating log files, and per-component debug modes. Numerical modules
log under "relscat.spectral.<module>": DEBUG for per-sample progress, INFO
for fitted results.
"""

import logging
import logging.handlers
import sys
from enum import Enum
from pathlib import Path
from typing import Dict, Optional, Set

from .config import XDGPaths


class LogLevel(Enum):
    """Enumeration of log levels."""

    DEBUG = logging.DEBUG
    INFO = logging.INFO
    WARNING = logging.WARNING
    ERROR = logging.ERROR
    CRITICAL = logging.CRITICAL

    @classmethod
    def from_name(cls, name: str) -> "LogLevel":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"Unknown log level: {name}") from None


class LoggingManager:
    """
    Centralized logging management for relscat.

    Provides configuration for application-wide logging, including:
    - Log level control
    - Console logging on stderr (stdout is reserved for command output)
    - Optional rotating log files
    - Debug mode for specific components
    """

    DEFAULT_LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    DEBUG_LOG_FORMAT = (
        "%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s"
    )

    # 10 MB
    MAX_LOG_SIZE = 10 * 1024 * 1024

    BACKUP_COUNT = 3

    def __init__(self, log_dir: Optional[Path] = None) -> None:
        """
        Initialize the logging manager.

        Args:
            log_dir: Directory for log files (default: $XDG_STATE_HOME/relscat/logs)
        """
        self._initialized = False
        self._log_dir = log_dir if log_dir is not None else XDGPaths.log_dir()
        self._log_file = self._log_dir / "relscat.log"
        self._debug_log_file = self._log_dir / "relscat-debug.log"
        self._log_level = LogLevel.INFO
        self._debug_components: Set[str] = set()
        self._handlers: Dict[str, logging.Handler] = {}

    def initialize(
        self,
        log_level: LogLevel = LogLevel.INFO,
        debug_mode: bool = False,
        log_to_file: bool = True,
    ) -> None:
        """
        Initialize the logging system.

        Args:
            log_level: Base log level
            debug_mode: Whether to enable debug mode globally
            log_to_file: Whether to attach rotating file handlers
        """
        if self._initialized:
            return

        self._log_level = log_level

        root_logger = logging.getLogger("relscat")
        root_logger.setLevel(logging.DEBUG if debug_mode else log_level.value)
        root_logger.propagate = False

        for handler in list(root_logger.handlers):
            root_logger.removeHandler(handler)

        self._setup_console_handler(debug_mode)
        if log_to_file:
            self._setup_file_handlers(debug_mode)

        self._initialized = True

        logger = logging.getLogger("relscat.core.logging")
        logger.info(f"Logging system initialized with level: {log_level.name}")
        if log_to_file:
            logger.info(f"Writing log file: {self.get_log_file_path()}")
        if debug_mode:
            logger.info("Debug mode enabled globally")

    def shutdown(self) -> None:
        """Detach and close all handlers installed by initialize()."""
        root_logger = logging.getLogger("relscat")
        for handler in self._handlers.values():
            root_logger.removeHandler(handler)
            handler.close()
        self._handlers.clear()
        for component in self._debug_components:
            logging.getLogger(f"relscat.{component}").setLevel(logging.NOTSET)
        self._debug_components.clear()
        self._initialized = False

    def _setup_console_handler(self, debug_mode: bool) -> None:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.DEBUG if debug_mode else self._log_level.value)
        formatter = logging.Formatter(
            self.DEBUG_LOG_FORMAT if debug_mode else self.DEFAULT_LOG_FORMAT
        )
        console_handler.setFormatter(formatter)
        logging.getLogger("relscat").addHandler(console_handler)
        self._handlers["console"] = console_handler

    def _setup_file_handlers(self, debug_mode: bool) -> None:
        """
        Set up file logging handlers with rotation.

        Args:
            debug_mode: Whether to enable debug logging to file
        """
        self._log_dir.mkdir(parents=True, exist_ok=True)

        file_handler = logging.handlers.RotatingFileHandler(
            self._log_file,
            maxBytes=self.MAX_LOG_SIZE,
            backupCount=self.BACKUP_COUNT,
            encoding="utf-8",
        )
        file_handler.setLevel(self._log_level.value)
        file_handler.setFormatter(logging.Formatter(self.DEFAULT_LOG_FORMAT))
        logging.getLogger("relscat").addHandler(file_handler)
        self._handlers["file"] = file_handler

        # always at DEBUG level
        debug_file_handler = logging.handlers.RotatingFileHandler(
            self._debug_log_file,
            maxBytes=self.MAX_LOG_SIZE,
            backupCount=self.BACKUP_COUNT,
            encoding="utf-8",
        )
        debug_file_handler.setLevel(logging.DEBUG)
        debug_file_handler.setFormatter(logging.Formatter(self.DEBUG_LOG_FORMAT))
        logging.getLogger("relscat").addHandler(debug_file_handler)
        self._handlers["debug_file"] = debug_file_handler

    def enable_debug_mode(self, component: Optional[str] = None) -> None:
        """
        Enable debug mode for a specific component or globally.

        Args:
            component: Component name (e.g., 'spectral.kernel_ops')
                      If None, enables debug mode globally
        """
        if self.is_debug_mode_enabled(component):
            return
        if component:
            self._debug_components.add(component)
            logger = logging.getLogger(f"relscat.{component}")
            logger.setLevel(logging.DEBUG)
            if "console" in self._handlers:
                self._handlers["console"].setLevel(logging.DEBUG)
            logger.info(f"Debug mode enabled for component: {component}")
        else:
            logging.getLogger("relscat").setLevel(logging.DEBUG)
            if "console" in self._handlers:
                self._handlers["console"].setLevel(logging.DEBUG)

            debug_formatter = logging.Formatter(self.DEBUG_LOG_FORMAT)
            for handler in self._handlers.values():
                handler.setFormatter(debug_formatter)

            logging.getLogger("relscat.core.logging").info("Debug mode enabled globally")

    def is_debug_mode_enabled(self, component: Optional[str] = None) -> bool:
        """
        Check if debug mode is enabled.

        Args:
            component: Component name to check (if None, checks global debug mode)

        Returns:
            True if debug mode is enabled, False otherwise
        """
        if component:
            return component in self._debug_components
        return logging.getLogger("relscat").level == logging.DEBUG

    def get_log_file_path(self, debug: bool = False) -> Path:
        return self._debug_log_file if debug else self._log_file


# Global logging manager instance
_logging_manager: Optional[LoggingManager] = None


def get_logging_manager() -> LoggingManager:
    """
    Get the global logging manager instance.

    Returns:
        LoggingManager instance
    """
    global _logging_manager
    if _logging_manager is None:
        _logging_manager = LoggingManager()
    return _logging_manager
