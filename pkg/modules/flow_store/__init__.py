"""
Flow store module exports.
"""

from .archive import ArchiveStatus, read_archive, read_archives, write_archive
from .flow_store import DEFAULT_CAPACITY, FlowStore, FlowView, StoreStatus, load

__all__ = [
    "ArchiveStatus",
    "read_archive",
    "read_archives",
    "write_archive",
    "DEFAULT_CAPACITY",
    "FlowStore",
    "FlowView",
    "StoreStatus",
    "load",
]
