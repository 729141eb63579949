"""
Logger setup for command-line entry points.
"""

import datetime
import pathlib
from typing import Any, Dict, Optional, Tuple

from . import logger


MAIN_LOGGER_NAME = "flowmon"
MAX_ATTEMPTS = 3


def setup_main_logger(
    config: Dict[str, Any],
    main_logger_name: str = MAIN_LOGGER_NAME,
    enable_log_to_file: bool = True,
    max_attempts: int = MAX_ATTEMPTS,
) -> Tuple[bool, Optional[logger.Logger], Optional[pathlib.Path]]:
    """
    Create a fresh timestamped run directory and the main logger writing into it.

    Parameters
    ----------
    config : Dict[str, Any]
        Configuration with a ``logger`` section.
    main_logger_name : str, optional
        Name of the main logger, by default MAIN_LOGGER_NAME.
    enable_log_to_file : bool, optional
        Whether to log to file, by default True.
    max_attempts : int, optional
        Timestamps tried (one second apart) to find an unused run directory name.

    Returns
    -------
    Tuple[bool, Optional[logger.Logger], Optional[pathlib.Path]]
        Success status, the logger and the run directory.
    """
    try:
        log_directory_path = config["logger"]["directory_path"]
        log_path_format = config["logger"]["file_datetime_format"]
    except KeyError as exception:
        print(f"ERROR: Config key(s) not found: {exception}")
        return False, None, None

    start_time = datetime.datetime.now()
    logging_path = None
    for attempt in range(0, max_attempts):
        candidate = pathlib.Path(
            log_directory_path,
            (start_time + datetime.timedelta(seconds=attempt)).strftime(log_path_format),
        )
        if not candidate.exists():
            logging_path = candidate
            break

    if logging_path is None:
        print("ERROR: Could not create new log directory")
        return False, None, None

    try:
        logging_path.mkdir(exist_ok=False, parents=True)
    except OSError as exception:
        print(f"ERROR: Could not create log directory {logging_path}: {exception}")
        return False, None, None

    result, main_logger = logger.Logger.create(
        main_logger_name, enable_log_to_file, config["logger"]
    )
    if not result:
        print("ERROR: Failed to create main logger")
        return False, None, None

    # Get Pylance to stop complaining
    assert main_logger is not None

    main_logger.info(f"{main_logger_name} logger initialized", True)

    return True, main_logger, logging_path
