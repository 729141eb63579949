"""
Logger module exports.
"""

from .logger import Logger

__all__ = ["Logger"]
