"""
Wrapper for a UDP socket.
"""

import enum
import socket
from typing import Optional, Tuple


MAX_DATAGRAM_SIZE = 65535


class RecvStatus(enum.Enum):
    """
    Outcome of waiting for one datagram.
    """

    OK = 0
    TIMEOUT = 1
    ERROR = 2


class UdpSocket:
    """
    Wrapper for a UDP socket. Every send and receive is exactly one datagram.
    """

    def __init__(self, socket_instance: socket.socket) -> None:
        """
        Parameters
        ----------
        socket_instance : socket.socket
            Socket to wrap.
        """
        self.__socket = socket_instance

    def send_to(self, data: bytes, host: str, port: int) -> bool:
        """
        Send one datagram.

        Parameters
        ----------
        data : bytes
            Payload, sent unsplit.
        host : str
            Destination host.
        port : int
            Destination port.

        Returns
        -------
        bool
            True if the datagram was handed to the kernel.
        """
        try:
            self.__socket.sendto(data, (host, port))
        except OSError as exception:
            print(f"ERROR: Could not send datagram: {exception}")
            return False

        return True

    def recv_datagram(
        self, buf_size: int = MAX_DATAGRAM_SIZE
    ) -> Tuple[RecvStatus, Optional[bytes], Optional[Tuple[str, int]]]:
        """
        Wait for one datagram, up to the socket timeout.

        Parameters
        ----------
        buf_size : int, optional
            Largest datagram accepted, by default 65535.

        Returns
        -------
        Tuple[RecvStatus, Optional[bytes], Optional[Tuple[str, int]]]
            Status, payload and sender address; payload and address are None unless OK.
        """
        try:
            data, address = self.__socket.recvfrom(buf_size)
        except socket.timeout:
            return RecvStatus.TIMEOUT, None, None
        except OSError as exception:
            print(f"ERROR: Could not receive data: {exception}")
            return RecvStatus.ERROR, None, None

        return RecvStatus.OK, data, address

    def close(self) -> None:
        """
        Close the underlying socket.
        """
        self.__socket.close()

    def get_socket(self) -> socket.socket:
        """
        Getter for the underlying socket object.
        """
        return self.__socket
