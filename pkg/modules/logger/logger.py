"""
Logger for the collector, the monitor and the command-line tools.
"""

import datetime
import inspect
import logging
import os
import pathlib
import sys
import types
from typing import Any, Dict, Optional, Tuple

from ..read_yaml import read_yaml


CONFIG_FILE_PATH = pathlib.Path(os.path.dirname(__file__), "config_logger.yaml")


class Logger:
    """
    Wraps a ``logging.Logger`` that writes to stdout and, optionally, to a per-run log file.
    """

    __create_key = object()

    @classmethod
    def create(
        cls,
        name: str,
        enable_log_to_file: bool,
        settings: Optional[Dict[str, Any]] = None,
    ) -> Tuple[bool, Optional["Logger"]]:
        """
        Create and configure a logger.

        Parameters
        ----------
        name : str
            Logger name; also the log file name.
        enable_log_to_file : bool
            Whether to also log to ``<name>.log`` in the newest run directory.
        settings : Optional[Dict[str, Any]], optional
            The ``logger`` section of an already loaded configuration; by default it is read from
            the packaged ``config_logger.yaml``.

        Returns
        -------
        Tuple[bool, Optional[Logger]]
            Success status and the logger.
        """
        if settings is None:
            result, config = read_yaml.open_config(CONFIG_FILE_PATH)
            if not result:
                print("ERROR: Failed to load logger configuration file")
                return False, None

            # Get Pylance to stop complaining
            assert config is not None

            settings = config.get("logger", {})

        try:
            log_directory_path = settings["directory_path"]
            file_datetime_format = settings["file_datetime_format"]
            logger_format = settings["format"]
            logger_datetime_format = settings["log_datetime_format"]
        except KeyError as exception:
            print(f"ERROR: Config key(s) not found: {exception}")
            return False, None

        logger = logging.getLogger(name)
        logger.setLevel(logging.DEBUG)
        logger.handlers.clear()

        formatter = logging.Formatter(fmt=logger_format, datefmt=logger_datetime_format)

        stream_handler = logging.StreamHandler(sys.stdout)
        stream_handler.setFormatter(formatter)
        logger.addHandler(stream_handler)

        if not enable_log_to_file:
            return True, Logger(cls.__create_key, logger, None)

        run_directory = cls.__newest_run_directory(log_directory_path, file_datetime_format)
        if run_directory is None:
            print("ERROR: The directory for this log session was not found.")
            return False, None

        file_path = pathlib.Path(run_directory, f"{name}.log")
        try:
            file_handler = logging.FileHandler(filename=file_path, mode="x")
        except OSError as exception:
            print(f"ERROR: Could not create log file {file_path}: {exception}")
            return False, None

        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

        return True, Logger(cls.__create_key, logger, run_directory)

    @staticmethod
    def __newest_run_directory(
        log_directory_path: str, file_datetime_format: str
    ) -> Optional[pathlib.Path]:
        """
        Run directory named by the most recent timestamp, None if there is none.
        """
        try:
            entries = os.listdir(log_directory_path)
        except OSError:
            return None

        run_times = []
        for entry in entries:
            if not os.path.isdir(os.path.join(log_directory_path, entry)):
                continue

            try:
                run_times.append(
                    (datetime.datetime.strptime(entry, file_datetime_format), entry)
                )
            except ValueError:
                continue

        if len(run_times) == 0:
            return None

        return pathlib.Path(log_directory_path, max(run_times)[1])

    def __init__(
        self,
        class_create_private_key: object,
        logger: logging.Logger,
        maybe_log_directory: Optional[pathlib.Path],
    ) -> None:
        """
        Private constructor, use create() method.
        """
        assert class_create_private_key is Logger.__create_key, "Use create() method."

        self.logger = logger
        self.__maybe_log_directory = maybe_log_directory

    @property
    def log_directory(self) -> Optional[pathlib.Path]:
        """
        Run directory of the log file, None if file logging is disabled.
        """
        return self.__maybe_log_directory

    @staticmethod
    def message_and_metadata(message: str, frame: Optional[types.FrameType]) -> str:
        """
        Prefix a message with the file, function and line of a frame.

        Parameters
        ----------
        message : str
            The log message.
        frame : Optional[types.FrameType]
            Frame of the caller, or None to leave the message unchanged.

        Returns
        -------
        str
            ``[file | function | line] message``.
        """
        if frame is None:
            return message

        function_name = frame.f_code.co_name
        filename = frame.f_code.co_filename
        line_number = inspect.getframeinfo(frame).lineno

        return f"[{filename} | {function_name} | {line_number}] {message}"

    def __log(
        self,
        level: int,
        message: str,
        log_with_frame_info: bool,
        method_frame: Optional[types.FrameType],
    ) -> None:
        if log_with_frame_info and method_frame is not None:
            message = self.message_and_metadata(message, method_frame.f_back)

        self.logger.log(level, message)

    def debug(self, message: str, log_with_frame_info: bool = True) -> None:
        """
        Log at debug level, by default prefixed with the caller's location.
        """
        self.__log(logging.DEBUG, message, log_with_frame_info, inspect.currentframe())

    def info(self, message: str, log_with_frame_info: bool = True) -> None:
        """
        Log at info level, by default prefixed with the caller's location.
        """
        self.__log(logging.INFO, message, log_with_frame_info, inspect.currentframe())

    def warning(self, message: str, log_with_frame_info: bool = True) -> None:
        """
        Log at warning level, by default prefixed with the caller's location.
        """
        self.__log(logging.WARNING, message, log_with_frame_info, inspect.currentframe())

    def error(self, message: str, log_with_frame_info: bool = True) -> None:
        """
        Log at error level, by default prefixed with the caller's location.
        """
        self.__log(logging.ERROR, message, log_with_frame_info, inspect.currentframe())

    def critical(self, message: str, log_with_frame_info: bool = True) -> None:
        """
        Log at critical level, by default prefixed with the caller's location.
        """
        self.__log(logging.CRITICAL, message, log_with_frame_info, inspect.currentframe())
