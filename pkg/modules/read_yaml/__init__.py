"""
YAML reading module exports.
"""

from .read_yaml import merge_defaults, open_config

__all__ = ["merge_defaults", "open_config"]
