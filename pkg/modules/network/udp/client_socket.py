"""
UDP socket that sends datagrams to one fixed destination.
"""

import socket
from typing import Optional, Tuple

from .socket_wrapper import UdpSocket


class UdpClientSocket(UdpSocket):
    """
    Unbound UDP socket with a fixed destination.
    """

    __create_key = object()

    def __init__(
        self,
        class_private_create_key: object,
        socket_instance: socket.socket,
        server_address: Tuple[str, int],
    ) -> None:
        """
        Private constructor, use create() method.
        """
        assert class_private_create_key is UdpClientSocket.__create_key, "Use create() method."

        super().__init__(socket_instance=socket_instance)
        self.__server_address = server_address

    @classmethod
    def create(
        cls, host: str = "localhost", port: int = 2055
    ) -> Tuple[bool, Optional["UdpClientSocket"]]:
        """
        Create a socket sending to ``host:port``.

        Parameters
        ----------
        host : str, optional
            Destination host, by default "localhost".
        port : int, optional
            Destination port, by default 2055.

        Returns
        -------
        Tuple[bool, Optional[UdpClientSocket]]
            Success status and the socket.
        """
        try:
            resolved = socket.gethostbyname(host)
        except socket.gaierror as exception:
            print(f"ERROR: Could not resolve {host}: {exception}")
            return False, None

        try:
            socket_instance = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        except OSError as exception:
            print(f"ERROR: Could not create socket: {exception}")
            return False, None

        return True, UdpClientSocket(cls.__create_key, socket_instance, (resolved, port))

    @property
    def server_address(self) -> Tuple[str, int]:
        """
        Destination (host, port).
        """
        return self.__server_address

    def send(self, data: bytes) -> bool:
        """
        Send one datagram to the destination.
        """
        host, port = self.__server_address
        return self.send_to(data, host, port)
