"""
Logger unit tests.
"""

import inspect
import pathlib
import re

import pytest

from modules.logger import logger
from modules.logger import logger_main_setup
from modules.read_yaml import read_yaml


@pytest.fixture
def logger_settings(tmp_path: pathlib.Path) -> dict:  # type: ignore
    """
    Packaged logger settings, with logs under a temporary directory.
    """
    result, config = read_yaml.open_config(logger.CONFIG_FILE_PATH)
    assert result
    assert config is not None

    settings = dict(config["logger"])
    settings["directory_path"] = str(pathlib.Path(tmp_path, "logs"))
    yield settings


@pytest.fixture
def main_logger_instance_and_logging_path(
    logger_settings: dict,
) -> tuple[logger.Logger, pathlib.Path]:  # type: ignore
    """
    Returns the main logger with logging to file enabled and sets up logging directory.
    """
    result, instance, logging_path = logger_main_setup.setup_main_logger(
        {"logger": logger_settings}, max_attempts=2
    )
    assert result
    assert instance is not None
    assert logging_path is not None

    yield instance, logging_path


@pytest.fixture
def logger_instance_to_file_disabled() -> logger.Logger:  # type: ignore
    """
    Returns a logger with logging to file disabled.
    """
    result, instance = logger.Logger.create("test_logger_to_file_disabled", False)
    assert result
    assert instance is not None
    yield instance


class TestMessageAndMetadata:
    """
    Test if message_and_metadata function correctly extracts information from the frame.
    """

    def test_message_and_metadata_with_frame(self) -> None:
        """
        Test by passing in a frame
        """
        frame = inspect.currentframe()
        assert frame is not None
        message = "Test message"

        actual, line_number = logger.Logger.message_and_metadata(message, frame), frame.f_lineno

        expected = (
            f"[{__file__} | {self.test_message_and_metadata_with_frame.__name__} | "
            f"{line_number}] Test message"
        )

        assert actual == expected

    def test_message_and_metadata_without_frame(self) -> None:
        """
        Test with frame is None
        """
        actual = logger.Logger.message_and_metadata("Test message", None)

        assert actual == "Test message"


# Fixtures are used to setup and teardown resources for tests
# pylint: disable=redefined-outer-name
class TestLogger:
    """
    Test if logger logs the correct messages to file and stdout
    """

    def test_log_with_frame_info(
        self, caplog: pytest.LogCaptureFixture, logger_instance_to_file_disabled: logger.Logger
    ) -> None:
        """
        Test if the caller's location is logged
        """
        test_message = "test message"

        frame = inspect.currentframe()
        assert frame is not None
        line_number = frame.f_lineno + 1
        logger_instance_to_file_disabled.debug(test_message, True)

        expected_pattern = re.compile(
            r"\["
            + re.escape(__file__)
            + rf" \| test_log_with_frame_info \| {line_number}\] "
            + re.escape(test_message)
        )

        assert re.search(expected_pattern, caplog.text) is not None

    def test_log_to_file(
        self,
        logger_settings: dict,
        main_logger_instance_and_logging_path: tuple[logger.Logger, pathlib.Path],
    ) -> None:
        """
        Test if messages are logged to file
        All levels are done in one test since they will all be logged to the same file
        """
        main_logger_instance, logging_path = main_logger_instance_and_logging_path
        result, logger_instance_to_file_enabled = logger.Logger.create(
            "test_logger_to_file_enabled", True, logger_settings
        )
        assert result
        assert logger_instance_to_file_enabled is not None
        assert logger_instance_to_file_enabled.log_directory == logging_path

        main_message = "main message"
        main_logger_instance.debug(main_message, False)
        main_logger_instance.info(main_message, False)
        main_logger_instance.warning(main_message, False)
        main_logger_instance.error(main_message, False)
        main_logger_instance.critical(main_message, False)

        test_message = "test message"
        logger_instance_to_file_enabled.debug(test_message, False)
        logger_instance_to_file_enabled.info(test_message, False)
        logger_instance_to_file_enabled.warning(test_message, False)
        logger_instance_to_file_enabled.error(test_message, False)
        logger_instance_to_file_enabled.critical(test_message, False)

        main_logging_path = pathlib.Path(logging_path, "flowmon.log")
        test_logging_path = pathlib.Path(logging_path, "test_logger_to_file_enabled.log")

        actual_main = main_logging_path.read_text(encoding="utf8")
        actual_test = test_logging_path.read_text(encoding="utf8")

        for level in ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]:
            # Timestamps are unknown
            assert f"[{level}] {main_message}\n" in actual_main
            assert f"[{level}] {test_message}\n" in actual_test

    def test_no_run_directory(self, logger_settings: dict) -> None:
        """
        File logging needs a run directory created by the main logger setup
        """
        result, instance = logger.Logger.create("orphan", True, logger_settings)

        assert not result
        assert instance is None

    def test_missing_setting(self) -> None:
        """
        Every format setting is required
        """
        result, instance = logger.Logger.create("incomplete", False, {"directory_path": "logs"})

        assert not result
        assert instance is None

    @pytest.mark.parametrize("level", ["debug", "info", "warning", "error", "critical"])
    def test_log_level_to_stdout(
        self,
        caplog: pytest.LogCaptureFixture,
        logger_instance_to_file_disabled: logger.Logger,
        level: str,
    ) -> None:
        """
        Test if each level's message is logged to stdout
        """
        test_message = "test message"

        getattr(logger_instance_to_file_disabled, level)(test_message, False)

        expected_pattern = re.compile(level.upper() + r".*" + re.escape(test_message))
        assert re.search(expected_pattern, caplog.text) is not None
