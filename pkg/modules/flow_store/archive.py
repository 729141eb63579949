"""
Binary flow archive.

Layout, big-endian: 8-byte magic ``FLOWARC1``, 4-byte format version, 8-byte record count, then
one 64-byte row per record (start_ms, end_ms, 48-byte NetFlow v5 record).
"""

import enum
import pathlib
import struct
from typing import List, Optional, Tuple

import numpy as np

from ..netflow import flow_array


ARCHIVE_MAGIC = b"FLOWARC1"
ARCHIVE_FORMAT_VERSION = 1
ARCHIVE_HEADER_FORMAT = "!8sIQ"
ARCHIVE_HEADER_SIZE = struct.calcsize(ARCHIVE_HEADER_FORMAT)  # 20 bytes


class ArchiveStatus(enum.Enum):
    """
    Outcome of an archive read or write.

    Attributes
    ----------
    OK : int
        Success.
    BAD_MAGIC : int
        File does not start with ``FLOWARC1``.
    BAD_VERSION : int
        Unsupported format version.
    TRUNCATED_ARCHIVE : int
        File length does not match the record count.
    IO_FAILURE : int
        File could not be read or written.
    NOTHING_TO_FLUSH : int
        No analyzed records are waiting to be archived.
    """

    OK = 0
    BAD_MAGIC = 1
    BAD_VERSION = 2
    TRUNCATED_ARCHIVE = 3
    IO_FAILURE = 4
    NOTHING_TO_FLUSH = 5


def write_archive(file_path: pathlib.Path, rows: np.ndarray) -> ArchiveStatus:
    """
    Write rows to an archive file.

    Parameters
    ----------
    file_path : pathlib.Path
        Destination, overwritten.
    rows : np.ndarray
        Rows in ``flow_array.FLOW_ROW_DTYPE``.

    Returns
    -------
    ArchiveStatus
        OK or IO_FAILURE.
    """
    rows = np.ascontiguousarray(rows, dtype=flow_array.FLOW_ROW_DTYPE)
    header = struct.pack(ARCHIVE_HEADER_FORMAT, ARCHIVE_MAGIC, ARCHIVE_FORMAT_VERSION, len(rows))

    try:
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with file_path.open("wb") as file:
            file.write(header)
            file.write(rows.tobytes())
    except OSError as exception:
        print(f"ERROR: Could not write archive {file_path}: {exception}")
        return ArchiveStatus.IO_FAILURE

    return ArchiveStatus.OK


def read_archive(file_path: pathlib.Path) -> Tuple[ArchiveStatus, Optional[np.ndarray]]:
    """
    Read every row of an archive file.

    Parameters
    ----------
    file_path : pathlib.Path
        Archive file.

    Returns
    -------
    Tuple[ArchiveStatus, Optional[np.ndarray]]
        Status and rows (None unless OK).
    """
    try:
        data = file_path.read_bytes()
    except OSError as exception:
        print(f"ERROR: Could not read archive {file_path}: {exception}")
        return ArchiveStatus.IO_FAILURE, None

    if len(data) < ARCHIVE_HEADER_SIZE:
        if not ARCHIVE_MAGIC.startswith(data[: len(ARCHIVE_MAGIC)]):
            return ArchiveStatus.BAD_MAGIC, None
        return ArchiveStatus.TRUNCATED_ARCHIVE, None

    magic, version, record_count = struct.unpack_from(ARCHIVE_HEADER_FORMAT, data, 0)
    if magic != ARCHIVE_MAGIC:
        return ArchiveStatus.BAD_MAGIC, None

    if version != ARCHIVE_FORMAT_VERSION:
        return ArchiveStatus.BAD_VERSION, None

    if len(data) != ARCHIVE_HEADER_SIZE + record_count * flow_array.FLOW_ROW_SIZE:
        return ArchiveStatus.TRUNCATED_ARCHIVE, None

    rows = np.frombuffer(
        data, dtype=flow_array.FLOW_ROW_DTYPE, count=record_count, offset=ARCHIVE_HEADER_SIZE
    ).copy()
    return ArchiveStatus.OK, rows


def read_archives(file_paths: List[pathlib.Path]) -> Tuple[ArchiveStatus, Optional[np.ndarray]]:
    """
    Read several archives and concatenate their rows in the given order.
    """
    parts = []
    for file_path in file_paths:
        status, rows = read_archive(file_path)
        if status != ArchiveStatus.OK:
            print(f"ERROR: {file_path}: {status.name}")
            return status, None

        parts.append(rows)

    if len(parts) == 0:
        return ArchiveStatus.OK, flow_array.empty_rows()

    return ArchiveStatus.OK, np.concatenate(parts)
