"""
UDP network module exports.
"""

from .socket_wrapper import MAX_DATAGRAM_SIZE, RecvStatus, UdpSocket
from .client_socket import UdpClientSocket
from .server_socket import UdpServerSocket

__all__ = ["MAX_DATAGRAM_SIZE", "RecvStatus", "UdpSocket", "UdpClientSocket", "UdpServerSocket"]
