"""
FlowData receiver: ingests NetFlow v5 datagrams into the flow store.
"""

import pathlib
import threading
import time
from typing import Optional, Tuple

from ..flow_store import flow_store
from ..logger import logger
from ..netflow import flow_array
from ..netflow import netflow_codec
from ..network.udp import server_socket
from ..network.udp import socket_wrapper
from . import collector_metrics
from . import sequence_tracker


DEFAULT_PORT = 2055
DEFAULT_RCVBUF_BYTES = 4 * 1024 * 1024
DEFAULT_RECV_TIMEOUT_S = 1.0
DEFAULT_METRICS_INTERVAL_S = 10.0


class FlowCollector:
    """
    UDP receive loop appending every valid record to one store. The loop is the store's only
    writer.
    """

    __create_key = object()

    @classmethod
    def create(
        cls,
        store: flow_store.FlowStore,
        local_logger: logger.Logger,
        host: str = "",
        port: int = DEFAULT_PORT,
        rcvbuf_bytes: int = DEFAULT_RCVBUF_BYTES,
        recv_timeout_s: float = DEFAULT_RECV_TIMEOUT_S,
        metrics_path: Optional[pathlib.Path] = None,
        metrics_interval_s: float = DEFAULT_METRICS_INTERVAL_S,
    ) -> Tuple[bool, Optional["FlowCollector"]]:
        """
        Bind the listening socket.

        Parameters
        ----------
        store : flow_store.FlowStore
            Store to append to.
        local_logger : logger.Logger
            Logger.
        host : str, optional
            Address to listen on, by default every interface.
        port : int, optional
            UDP port, by default 2055; 0 picks a free port.
        rcvbuf_bytes : int, optional
            Socket receive buffer requested, by default 4 MiB.
        recv_timeout_s : float, optional
            Longest wait for a datagram before checking for shutdown, by default 1 s.
        metrics_path : Optional[pathlib.Path], optional
            Metrics snapshot file, rewritten periodically and at shutdown.
        metrics_interval_s : float, optional
            Seconds between metrics snapshots, by default 10.

        Returns
        -------
        Tuple[bool, Optional[FlowCollector]]
            Success status and the collector; fails if the port cannot be bound.
        """
        result, socket_instance = server_socket.UdpServerSocket.create(
            host, port, recv_timeout_s, rcvbuf_bytes
        )
        if not result:
            local_logger.error(f"Could not bind {host}:{port}")
            return False, None

        # Get Pylance to stop complaining
        assert socket_instance is not None

        granted = socket_instance.rcvbuf_bytes()
        if granted < rcvbuf_bytes:
            local_logger.warning(
                f"Receive buffer {granted} bytes is below the requested {rcvbuf_bytes} bytes"
            )

        return True, FlowCollector(
            cls.__create_key, store, local_logger, socket_instance, metrics_path, metrics_interval_s
        )

    def __init__(
        self,
        class_private_create_key: object,
        store: flow_store.FlowStore,
        local_logger: logger.Logger,
        socket_instance: server_socket.UdpServerSocket,
        metrics_path: Optional[pathlib.Path],
        metrics_interval_s: float,
    ) -> None:
        """
        Private constructor, use create() method.
        """
        assert class_private_create_key is FlowCollector.__create_key, "Use create() method."

        self.__store = store
        self.__logger = local_logger
        self.__socket = socket_instance
        self.__metrics_path = metrics_path
        self.__metrics_interval_s = metrics_interval_s

        self.metrics = collector_metrics.MetricsCounter()
        self.__sequences = sequence_tracker.SequenceTracker()

        self.__stop_event: Optional[threading.Event] = None
        self.__thread: Optional[threading.Thread] = None
        self.__closed = False

    def address(self) -> Tuple[str, int]:
        """
        Bound (host, port).
        """
        return self.__socket.address()

    def handle_datagram(self, datagram: bytes, exporter: str) -> netflow_codec.CodecStatus:
        """
        Decode one datagram and append its acceptable records to the store.

        Parameters
        ----------
        datagram : bytes
            UDP payload.
        exporter : str
            Sender address; with the engine id it keys sequence tracking.

        Returns
        -------
        netflow_codec.CodecStatus
            Codec status; anything but OK means the datagram was ignored.
        """
        status, header = netflow_codec.decode_header(datagram)
        if status != netflow_codec.CodecStatus.OK:
            self.metrics.record_decode_error()
            self.__logger.debug(f"Datagram of {len(datagram)} bytes from {exporter}: {status.name}")
            return status

        # Get Pylance to stop complaining
        assert header is not None

        gap = self.__sequences.track((exporter, header.engine_id), header)
        rows = flow_array.packet_to_rows(datagram, header)
        store_status, accepted = self.__store.append_rows(rows)
        dropped = len(rows) - accepted
        if store_status == flow_store.StoreStatus.CAPACITY_EXCEEDED:
            self.__logger.warning(f"Store full, dropped {dropped} records", False)

        self.metrics.record_datagram(
            accepted=accepted, rejected=header.count - len(rows), dropped=dropped, gap=gap
        )
        return status

    def serve(self, stop_event: threading.Event) -> None:
        """
        Receive until the event is set.

        Parameters
        ----------
        stop_event : threading.Event
            Checked at least once per receive timeout.
        """
        _, port = self.address()
        last_snapshot = time.monotonic()
        while not stop_event.is_set():
            status, datagram, sender = self.__socket.recv_datagram()
            if status == socket_wrapper.RecvStatus.OK:
                # Get Pylance to stop complaining
                assert datagram is not None
                assert sender is not None

                self.handle_datagram(datagram, sender[0])
            elif status == socket_wrapper.RecvStatus.ERROR:
                self.__logger.error("Receive failed")

            if time.monotonic() - last_snapshot >= self.__metrics_interval_s:
                self.metrics.set_socket_drops(collector_metrics.read_socket_drops(port))
                self.write_metrics()
                last_snapshot = time.monotonic()

    def write_metrics(self) -> bool:
        """
        Write the metrics snapshot file if one is configured.
        """
        if self.__metrics_path is None:
            return True

        return collector_metrics.write_metrics(self.metrics.snapshot(), self.__metrics_path)

    def start(self) -> None:
        """
        Run ``serve`` on a dedicated daemon thread.
        """
        if self.__stop_event is not None:
            return

        self.__stop_event = threading.Event()
        self.__thread = threading.Thread(
            target=self.serve, args=(self.__stop_event,), name="FlowData-Receiver", daemon=True
        )
        self.__thread.start()
        host, port = self.address()
        self.__logger.info(f"Listening for flow export on {host}:{port}")

    def shutdown(self, join_timeout: Optional[float] = 5.0) -> None:
        """
        Stop the receive thread, write final metrics and close the socket.

        Parameters
        ----------
        join_timeout : Optional[float], optional
            Seconds to wait for the thread, by default 5.
        """
        if self.__stop_event is not None:
            self.__stop_event.set()

            # Get Pylance to stop complaining
            assert self.__thread is not None

            if self.__thread.is_alive():
                self.__thread.join(timeout=join_timeout)

            self.__thread = None
            self.__stop_event = None

        if self.__closed:
            return

        _, port = self.address()
        self.metrics.set_socket_drops(collector_metrics.read_socket_drops(port))
        self.write_metrics()
        self.__socket.close()
        self.__closed = True
        self.__logger.info(f"Collector stopped: {self.metrics.snapshot()}")
