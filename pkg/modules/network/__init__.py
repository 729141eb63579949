"""
Network module exports.
"""

from . import udp

__all__ = ["udp"]
