"""
UDP socket bound to a local address for receiving flow export.
"""

import socket
from typing import Optional, Tuple

from .socket_wrapper import UdpSocket


class UdpServerSocket(UdpSocket):
    """
    Bound UDP socket with a receive timeout and an enlarged receive buffer.
    """

    __create_key = object()

    def __init__(self, class_private_create_key: object, socket_instance: socket.socket) -> None:
        """
        Private constructor, use create() method.
        """
        assert class_private_create_key is UdpServerSocket.__create_key, "Use create() method."

        super().__init__(socket_instance=socket_instance)

    @classmethod
    def create(
        cls,
        host: str = "",
        port: int = 2055,
        recv_timeout_s: float = 1.0,
        rcvbuf_bytes: Optional[int] = None,
    ) -> Tuple[bool, Optional["UdpServerSocket"]]:
        """
        Create a UDP socket bound to the provided host and port.

        Parameters
        ----------
        host : str, optional
            Address to bind, by default "" for every interface.
        port : int, optional
            Port to bind, by default 2055; 0 picks a free port.
        recv_timeout_s : float, optional
            How long a receive waits before returning TIMEOUT, by default 1.0.
        rcvbuf_bytes : Optional[int], optional
            Receive buffer size requested from the kernel, by default the system default.

        Returns
        -------
        Tuple[bool, Optional[UdpServerSocket]]
            Success status and the socket; fails if the address cannot be bound.
        """
        if recv_timeout_s <= 0:
            print("ERROR: Receive timeout must be positive.")
            return False, None

        socket_instance = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        try:
            if rcvbuf_bytes is not None:
                socket_instance.setsockopt(socket.SOL_SOCKET, socket.SO_RCVBUF, rcvbuf_bytes)

            socket_instance.settimeout(recv_timeout_s)
            socket_instance.bind((host, port))
        except OSError as exception:
            print(f"ERROR: Could not bind {host}:{port}: {exception}")
            socket_instance.close()
            return False, None

        return True, UdpServerSocket(cls.__create_key, socket_instance)

    def address(self) -> Tuple[str, int]:
        """
        Bound (host, port).
        """
        host, port = self.get_socket().getsockname()[:2]
        return host, port

    def rcvbuf_bytes(self) -> int:
        """
        Receive buffer size granted by the kernel (Linux reports twice the requested size).
        """
        return self.get_socket().getsockopt(socket.SOL_SOCKET, socket.SO_RCVBUF)
