"""
Re-packetize archived rows into NetFlow v5 datagrams and send them at a paced rate.
"""

import struct
import time
from typing import Callable, Iterator, NamedTuple, Optional

import numpy as np

from ..netflow import flow_array
from ..netflow import netflow_codec
from ..network.udp import client_socket


ACHIEVED_TOLERANCE = 0.05
BOOT_LEAD_MS = 1_000


class ReplayStats(NamedTuple):
    """
    Outcome of one replay.
    """

    datagrams_sent: int
    records_sent: int
    send_failures: int
    elapsed_s: float
    requested_pps: float

    @property
    def achieved_pps(self) -> float:
        """
        Datagrams per second actually sent.
        """
        if self.elapsed_s <= 0:
            return float(self.datagrams_sent)

        return self.datagrams_sent / self.elapsed_s

    @property
    def below_target(self) -> bool:
        """
        Whether the achieved rate fell more than 5% short of the requested one.
        """
        return self.achieved_pps < self.requested_pps * (1 - ACHIEVED_TOLERANCE)


def packetize(rows: np.ndarray, engine_id: int = 0) -> Iterator[bytes]:
    """
    Datagrams of up to 30 records whose headers reproduce every row's start and end times.

    The exporter is taken to have booted just before the earliest start; each datagram is
    exported at the latest end time among its records.

    Parameters
    ----------
    rows : np.ndarray
        Rows in ``flow_array.FLOW_ROW_DTYPE``, spanning less than 2^31 ms.
    engine_id : int, optional
        Engine id written to every header, by default 0.

    Yields
    ------
    bytes
        One datagram per 30 rows, flow_sequence counting records sent so far.
    """
    if len(rows) == 0:
        return

    boot_ms = int(rows["start_ms"].min()) - BOOT_LEAD_MS
    step = netflow_codec.MAX_RECORDS_PER_PACKET

    for offset in range(0, len(rows), step):
        chunk = rows[offset : offset + step]
        raw = np.empty(len(chunk), dtype=flow_array.RAW_RECORD_DTYPE)
        for name in flow_array.RAW_FIELDS:
            raw[name] = chunk[name]

        raw["first"] = (chunk["start_ms"].astype(np.int64) - boot_ms) & netflow_codec.UINT32_MASK
        raw["last"] = (chunk["end_ms"].astype(np.int64) - boot_ms) & netflow_codec.UINT32_MASK

        export_ms = int(chunk["end_ms"].max())
        header = netflow_codec.ExportHeader(
            count=len(chunk),
            sys_uptime=(export_ms - boot_ms) & netflow_codec.UINT32_MASK,
            unix_secs=export_ms // 1000,
            unix_nsecs=(export_ms % 1000) * 1_000_000,
            flow_sequence=offset & netflow_codec.UINT32_MASK,
            engine_id=engine_id,
        )
        yield struct.pack(netflow_codec.HEADER_FORMAT, *header) + raw.tobytes()


def replay(
    rows: np.ndarray,
    target: client_socket.UdpClientSocket,
    pps: float,
    clock: Callable[[], float] = time.perf_counter,
    sleep: Callable[[float], None] = time.sleep,
    max_datagrams: Optional[int] = None,
) -> ReplayStats:
    """
    Send rows as paced datagrams.

    Datagrams go out one interval apart. A send that falls behind its slot moves the schedule
    forward to the current time, so a stall is never followed by a burst.

    Parameters
    ----------
    rows : np.ndarray
        Rows to send.
    target : client_socket.UdpClientSocket
        Destination.
    pps : float
        Datagrams per second; must be positive.
    clock : Callable[[], float], optional
        Monotonic seconds, by default ``time.perf_counter``.
    sleep : Callable[[float], None], optional
        By default ``time.sleep``.
    max_datagrams : Optional[int], optional
        Stop after this many datagrams.

    Returns
    -------
    ReplayStats
        Counts and timing.
    """
    assert pps > 0

    interval = 1.0 / pps
    sent = 0
    records = 0
    failures = 0
    start = clock()
    next_slot = start
    for index, datagram in enumerate(packetize(rows)):
        if max_datagrams is not None and index >= max_datagrams:
            break

        now = clock()
        if next_slot > now:
            sleep(next_slot - now)
            now = next_slot
        next_slot = now + interval

        if target.send(datagram):
            sent += 1
            records += (len(datagram) - netflow_codec.HEADER_SIZE) // netflow_codec.RECORD_SIZE
        else:
            failures += 1

    return ReplayStats(sent, records, failures, clock() - start, pps)
