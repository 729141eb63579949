"""
Bounded in-memory buffer of resolved flow records.
"""

import enum
import pathlib
import threading
from typing import List, Optional, Tuple

import numpy as np

from ..netflow import flow_array
from ..netflow import netflow_codec
from . import archive


DEFAULT_CAPACITY = 50_000_000  # 64-byte rows, about 3.2 GB when full


class StoreStatus(enum.Enum):
    """
    Outcome of an append.

    Attributes
    ----------
    OK : int
        Every record was stored.
    CAPACITY_EXCEEDED : int
        At least one record was dropped because the store is full.
    """

    OK = 0
    CAPACITY_EXCEEDED = 1


class FlowView:
    """
    Immutable copy of the records whose end time falls in a half-open window.
    """

    def __init__(self, rows: np.ndarray, start_ms: int, end_ms: int) -> None:
        """
        Wrap rows already copied out of the store.

        Parameters
        ----------
        rows : np.ndarray
            Rows owned by this view.
        start_ms : int
            Window start, inclusive.
        end_ms : int
            Window end, exclusive.
        """
        rows.setflags(write=False)
        self.__rows = rows
        self.start_ms = start_ms
        self.end_ms = end_ms

    @classmethod
    def from_rows(cls, rows: np.ndarray, start_ms: int, end_ms: int) -> "FlowView":
        """
        View over rows that did not come from a store (archives, generators).
        """
        end_times = rows["end_ms"]
        selected = rows[(end_times >= start_ms) & (end_times < end_ms)]
        return FlowView(np.array(selected, copy=True), start_ms, end_ms)

    @property
    def rows(self) -> np.ndarray:
        """
        Read-only rows.
        """
        return self.__rows

    def to_records(self) -> List[netflow_codec.FlowRecord]:
        """
        Rows as resolved records.
        """
        return flow_array.rows_to_records(self.__rows)

    def __len__(self) -> int:
        return len(self.__rows)


class FlowStore:
    """
    Fixed-capacity row buffer with an analysis watermark.

    One writer appends; snapshots and flushes come from the single monitoring thread. Appends
    only ever write past the current count, so a snapshot can filter the committed prefix without
    holding the lock.
    """

    __create_key = object()

    @classmethod
    def create(cls, capacity: int = DEFAULT_CAPACITY) -> Tuple[bool, Optional["FlowStore"]]:
        """
        Create an empty store.

        Parameters
        ----------
        capacity : int, optional
            Maximum resident record count, by default DEFAULT_CAPACITY.

        Returns
        -------
        Tuple[bool, Optional[FlowStore]]
            Success status and the store.
        """
        if capacity <= 0:
            print("ERROR: Flow store capacity must be positive")
            return False, None

        try:
            # Pages are only committed as rows are written
            rows = np.empty(capacity, dtype=flow_array.FLOW_ROW_DTYPE)
        except MemoryError:
            print(f"ERROR: Could not allocate flow store of {capacity} records")
            return False, None

        return True, FlowStore(cls.__create_key, rows)

    def __init__(self, class_private_create_key: object, rows: np.ndarray) -> None:
        """
        Private constructor, use create() method.
        """
        assert class_private_create_key is FlowStore.__create_key, "Use create() method."

        self.__rows = rows
        self.__count = 0
        self.__watermark = 0
        self.__lock = threading.Lock()

    @property
    def capacity(self) -> int:
        """
        Maximum resident record count.
        """
        return len(self.__rows)

    @property
    def watermark(self) -> int:
        """
        Number of leading records already analyzed and waiting to be flushed.
        """
        return self.__watermark

    def __len__(self) -> int:
        return self.__count

    def pending_count(self) -> int:
        """
        Records not yet analyzed.
        """
        return self.__count - self.__watermark

    def append(self, records: List[netflow_codec.FlowRecord]) -> Tuple[StoreStatus, int]:
        """
        Append resolved records in order.

        Parameters
        ----------
        records : List[netflow_codec.FlowRecord]
            Records to append.

        Returns
        -------
        Tuple[StoreStatus, int]
            CAPACITY_EXCEEDED if any record was dropped, and how many were accepted.
        """
        return self.append_rows(flow_array.records_to_rows(records))

    def append_rows(self, rows: np.ndarray) -> Tuple[StoreStatus, int]:
        """
        Append rows in order, as many as fit.

        Parameters
        ----------
        rows : np.ndarray
            Rows in ``flow_array.FLOW_ROW_DTYPE``.

        Returns
        -------
        Tuple[StoreStatus, int]
            CAPACITY_EXCEEDED if any row was dropped, and how many were accepted.
        """
        with self.__lock:
            accepted = min(len(rows), len(self.__rows) - self.__count)
            self.__rows[self.__count : self.__count + accepted] = rows[:accepted]
            self.__count += accepted

        if accepted < len(rows):
            return StoreStatus.CAPACITY_EXCEEDED, accepted

        return StoreStatus.OK, accepted

    def snapshot(self, start_ms: int, end_ms: int) -> Tuple[bool, Optional[FlowView]]:
        """
        Copy out the records whose end time falls in ``[start_ms, end_ms)``.

        Parameters
        ----------
        start_ms : int
            Window start, inclusive.
        end_ms : int
            Window end, exclusive.

        Returns
        -------
        Tuple[bool, Optional[FlowView]]
            Success status and the view; an empty window yields an empty view.
        """
        if start_ms >= end_ms:
            return False, None

        with self.__lock:
            committed = self.__rows[: self.__count]

        end_times = committed["end_ms"]
        selected = committed[(end_times >= start_ms) & (end_times < end_ms)]
        return True, FlowView(np.array(selected, copy=True), start_ms, end_ms)

    def all_rows(self) -> np.ndarray:
        """
        Copy of every resident row in append order.
        """
        with self.__lock:
            committed = self.__rows[: self.__count]

        return np.array(committed, copy=True)

    def mark_analyzed(self, before_ms: int) -> int:
        """
        Advance the watermark over the leading run of records that ended before ``before_ms``.

        Parameters
        ----------
        before_ms : int
            End of the last analyzed window.

        Returns
        -------
        int
            New watermark.
        """
        with self.__lock:
            count = self.__count

        pending_end_times = self.__rows[self.__watermark : count]["end_ms"]
        later = np.flatnonzero(pending_end_times >= before_ms)
        advance = int(later[0]) if len(later) > 0 else len(pending_end_times)
        self.__watermark += advance
        return self.__watermark

    def flush(self, file_path: pathlib.Path) -> Tuple[archive.ArchiveStatus, int]:
        """
        Archive the analyzed records and remove them from memory.

        Parameters
        ----------
        file_path : pathlib.Path
            Archive file to write.

        Returns
        -------
        Tuple[archive.ArchiveStatus, int]
            Status and number of records flushed.
        """
        flushed = self.__watermark
        if flushed == 0:
            return archive.ArchiveStatus.NOTHING_TO_FLUSH, 0

        status = archive.write_archive(file_path, self.__rows[:flushed])
        if status != archive.ArchiveStatus.OK:
            return status, 0

        with self.__lock:
            remaining = self.__count - flushed
            self.__rows[:remaining] = self.__rows[flushed : self.__count]
            self.__count = remaining
            self.__watermark = 0

        return archive.ArchiveStatus.OK, flushed


def load(
    file_path: pathlib.Path,
) -> Tuple[archive.ArchiveStatus, Optional[List[netflow_codec.FlowRecord]]]:
    """
    Read an archive as resolved records.

    Parameters
    ----------
    file_path : pathlib.Path
        Archive written by ``FlowStore.flush`` or ``archive.write_archive``.

    Returns
    -------
    Tuple[archive.ArchiveStatus, Optional[List[netflow_codec.FlowRecord]]]
        Status and records (None unless OK).
    """
    status, rows = archive.read_archive(file_path)
    if status != archive.ArchiveStatus.OK:
        return status, None

    # Get Pylance to stop complaining
    assert rows is not None

    return status, flow_array.rows_to_records(rows)
