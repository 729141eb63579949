"""
Collector counters, their JSON snapshot file and kernel socket drop counts.
"""

import json
import pathlib
import threading
from typing import Any, Dict, NamedTuple, Optional, Tuple


PROC_NET_UDP = pathlib.Path("/proc/net/udp")


class CollectorMetrics(NamedTuple):
    """
    Snapshot of collector counters.

    Attributes
    ----------
    datagrams_received : int
    records_accepted : int
        Records appended to the store.
    records_rejected : int
        Records of valid datagrams dropped for carrying no packets or fewer bytes than packets.
    records_dropped : int
        Records lost because the store was full.
    decode_errors : int
        Datagrams rejected by the codec.
    sequence_gaps : int
        Records estimated lost from flow_sequence discontinuities.
    socket_drops : Optional[int]
        Datagrams the kernel dropped on the receive socket, None where unavailable.
    """

    datagrams_received: int = 0
    records_accepted: int = 0
    records_rejected: int = 0
    records_dropped: int = 0
    decode_errors: int = 0
    sequence_gaps: int = 0
    socket_drops: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        """
        JSON-compatible form.
        """
        return self._asdict()

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> Tuple[bool, Optional["CollectorMetrics"]]:
        """
        Inverse of ``to_dict``; missing counters read as 0.
        """
        try:
            socket_drops = values.get("socket_drops")
            metrics = cls(
                **{name: int(values.get(name, 0)) for name in cls._fields[:-1]},
                socket_drops=int(socket_drops) if socket_drops is not None else None,
            )
        except (TypeError, ValueError) as exception:
            print(f"ERROR: Malformed metrics: {exception}")
            return False, None

        return True, metrics


class MetricsCounter:
    """
    Thread-safe counters updated by the receive loop and read by the monitor.
    """

    def __init__(self) -> None:
        self.__lock = threading.Lock()
        self.__metrics = CollectorMetrics()

    def record_datagram(
        self, accepted: int = 0, rejected: int = 0, dropped: int = 0, gap: int = 0
    ) -> None:
        """
        Count one decoded datagram.
        """
        with self.__lock:
            metrics = self.__metrics
            self.__metrics = metrics._replace(
                datagrams_received=metrics.datagrams_received + 1,
                records_accepted=metrics.records_accepted + accepted,
                records_rejected=metrics.records_rejected + rejected,
                records_dropped=metrics.records_dropped + dropped,
                sequence_gaps=metrics.sequence_gaps + gap,
            )

    def record_decode_error(self) -> None:
        """
        Count one datagram the codec rejected.
        """
        with self.__lock:
            metrics = self.__metrics
            self.__metrics = metrics._replace(
                datagrams_received=metrics.datagrams_received + 1,
                decode_errors=metrics.decode_errors + 1,
            )

    def set_socket_drops(self, socket_drops: Optional[int]) -> None:
        """
        Latest kernel drop count.
        """
        with self.__lock:
            self.__metrics = self.__metrics._replace(socket_drops=socket_drops)

    def snapshot(self) -> CollectorMetrics:
        """
        Consistent copy of every counter.
        """
        with self.__lock:
            return self.__metrics


def read_socket_drops(port: int, proc_path: pathlib.Path = PROC_NET_UDP) -> Optional[int]:
    """
    Kernel drop counter of the IPv4 UDP socket bound to a local port.

    Parameters
    ----------
    port : int
        Local port of the socket.
    proc_path : pathlib.Path, optional
        Socket table, by default ``/proc/net/udp``.

    Returns
    -------
    Optional[int]
        Drops, None if the table is unavailable or has no such socket.
    """
    try:
        lines = proc_path.read_text(encoding="utf8").splitlines()
    except OSError:
        return None

    for line in lines[1:]:
        columns = line.split()
        if len(columns) < 13:
            continue

        _, _, local_port = columns[1].partition(":")
        try:
            if int(local_port, 16) == port:
                return int(columns[-1])
        except ValueError:
            continue

    return None


def write_metrics(metrics: CollectorMetrics, file_path: pathlib.Path) -> bool:
    """
    Replace the metrics snapshot file.
    """
    temporary_path = file_path.with_name(file_path.name + ".tmp")
    try:
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with temporary_path.open("w", encoding="utf8") as file:
            json.dump(metrics.to_dict(), file, indent=2)
        temporary_path.replace(file_path)
    except OSError as exception:
        print(f"ERROR: Could not write metrics {file_path}: {exception}")
        return False

    return True


def read_metrics(file_path: pathlib.Path) -> Tuple[bool, Optional[CollectorMetrics]]:
    """
    Read a snapshot written by ``write_metrics``.
    """
    try:
        with file_path.open("r", encoding="utf8") as file:
            values = json.load(file)
    except (OSError, json.JSONDecodeError) as exception:
        print(f"ERROR: Could not read metrics {file_path}: {exception}")
        return False, None

    if not isinstance(values, dict):
        print(f"ERROR: Metrics file {file_path} is not a JSON object")
        return False, None

    return CollectorMetrics.from_dict(values)
