"""
Unit tests for the logging manager.
"""

import logging

import pytest

from relscat.core.logging_manager import (
    LogLevel,
    LoggingManager,
    get_logging_manager,
)


@pytest.fixture
def logging_manager(tmp_path):
    """A LoggingManager writing into a temporary directory."""
    manager = LoggingManager(log_dir=tmp_path / "logs")
    yield manager
    manager.shutdown()
    logging.getLogger("relscat").setLevel(logging.NOTSET)


class TestLogLevel:
    def test_from_name(self):
        assert LogLevel.from_name("debug") is LogLevel.DEBUG

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            LogLevel.from_name("verbose")


class TestLoggingManager:
    """Tests for the LoggingManager class."""

    def test_initialization(self, logging_manager):
        logging_manager.initialize()
        assert logging_manager.get_log_file_path().parent.exists()
        assert set(logging_manager._handlers) == {"console", "file", "debug_file"}

    def test_console_only(self, logging_manager):
        logging_manager.initialize(log_to_file=False)
        assert set(logging_manager._handlers) == {"console"}
        assert not logging_manager.get_log_file_path().exists()

    def test_initialize_is_idempotent(self, logging_manager):
        logging_manager.initialize(log_to_file=False)
        logging_manager.initialize(log_level=LogLevel.ERROR, log_to_file=False)
        assert logging.getLogger("relscat").level == logging.INFO

    def test_level_applies_to_handlers(self, logging_manager):
        logging_manager.initialize(log_level=LogLevel.WARNING)
        assert logging.getLogger("relscat").level == logging.WARNING
        assert logging_manager._handlers["console"].level == logging.WARNING
        assert logging_manager._handlers["file"].level == logging.WARNING
        assert logging_manager._handlers["debug_file"].level == logging.DEBUG

    def test_global_debug_mode(self, logging_manager):
        logging_manager.initialize(log_to_file=False)
        assert not logging_manager.is_debug_mode_enabled()
        logging_manager.enable_debug_mode()
        assert logging_manager.is_debug_mode_enabled()
        assert logging_manager._handlers["console"].level == logging.DEBUG

    def test_component_debug_mode(self, logging_manager):
        logging_manager.initialize(log_to_file=False)
        logging_manager.enable_debug_mode("spectral.scattering")
        assert logging_manager.is_debug_mode_enabled("spectral.scattering")
        assert logging.getLogger("relscat.spectral.scattering").level == logging.DEBUG
        logging_manager.enable_debug_mode("spectral.scattering")
        assert logging_manager._debug_components == {"spectral.scattering"}
        logging_manager.shutdown()
        assert logging.getLogger("relscat.spectral.scattering").level == logging.NOTSET
        assert not logging_manager.is_debug_mode_enabled("spectral.scattering")

    def test_messages_reach_log_file(self, logging_manager):
        logging_manager.initialize()
        logging.getLogger("relscat.spectral.grid").info("grid ready")
        for handler in logging_manager._handlers.values():
            handler.flush()
        text = logging_manager.get_log_file_path().read_text()
        assert "relscat.spectral.grid" in text
        assert "grid ready" in text
        assert "Writing log file" in text
        assert logging_manager.get_log_file_path(debug=True).stat().st_size > 0

    def test_shutdown_detaches_handlers(self, logging_manager):
        logging_manager.initialize(log_to_file=False)
        logging_manager.shutdown()
        assert logging.getLogger("relscat").handlers == []


class TestHelpers:
    def test_global_manager(self):
        assert get_logging_manager() is get_logging_manager()
