"""
Core infrastructure for relscat: configuration, logging and error handling.
"""

from .config import ConfigManager, ExperimentConfig, XDGPaths
from .error_handler import (
    AssemblyError,
    ConfigError,
    DomainError,
    FitError,
    NumericalError,
    RelscatError,
    ResourceError,
    ShapeError,
    ThresholdError,
    UnsupportedKindError,
    get_error_handler,
)
from .logging_manager import LoggingManager, LogLevel, get_logging_manager

__all__ = [
    "AssemblyError",
    "ConfigError",
    "ConfigManager",
    "DomainError",
    "ExperimentConfig",
    "FitError",
    "LogLevel",
    "LoggingManager",
    "NumericalError",
    "RelscatError",
    "ResourceError",
    "ShapeError",
    "ThresholdError",
    "UnsupportedKindError",
    "XDGPaths",
    "get_error_handler",
    "get_logging_manager",
]
