"""
For YAML files.
"""

import copy
import pathlib
from typing import Any, Dict, Optional, Tuple

import yaml


def open_config(file_path: pathlib.Path) -> Tuple[bool, Optional[Dict[str, Any]]]:
    """
    Open and decode a YAML file whose top level is a mapping.

    Parameters
    ----------
    file_path : pathlib.Path
        Path to the YAML file.

    Returns
    -------
    Tuple[bool, Optional[Dict[str, Any]]]
        Success status and the decoded mapping (None if failed). An empty file decodes to ``{}``.
    """
    try:
        with file_path.open("r", encoding="utf8") as file:
            config = yaml.safe_load(file)
    except yaml.YAMLError as exception:
        print(f"ERROR: Could not parse YAML file: {exception}")
        return False, None
    except FileNotFoundError as exception:
        print(f"ERROR: YAML file not found: {exception}")
        return False, None
    except OSError as exception:
        print(f"ERROR: Could not open file: {exception}")
        return False, None

    if config is None:
        return True, {}

    if not isinstance(config, dict):
        print(f"ERROR: Top level of {file_path} is not a mapping")
        return False, None

    return True, config


def merge_defaults(config: Dict[str, Any], defaults: Dict[str, Any]) -> Dict[str, Any]:
    """
    Nested copy of ``defaults`` with every value present in ``config`` taking precedence.

    Parameters
    ----------
    config : Dict[str, Any]
        Values read from a file.
    defaults : Dict[str, Any]
        Values used where the file is silent.

    Returns
    -------
    Dict[str, Any]
        Merged mapping; neither input is modified.
    """
    merged = copy.deepcopy(defaults)
    for key, value in config.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_defaults(value, merged[key])
        else:
            merged[key] = copy.deepcopy(value)

    return merged
