"""
UDP socket tests over the loopback interface.
"""

import pytest

from modules.network.udp import RecvStatus
from modules.network.udp import UdpClientSocket
from modules.network.udp import UdpServerSocket


@pytest.fixture
def server() -> UdpServerSocket:  # type: ignore
    """
    Server on a free loopback port.
    """
    result, instance = UdpServerSocket.create("127.0.0.1", 0, recv_timeout_s=0.2)
    assert result
    assert instance is not None

    yield instance

    instance.close()


# Fixtures are used to setup and teardown resources for tests
# pylint: disable=redefined-outer-name
class TestUdpSockets:
    """
    One datagram per send, one per receive.
    """

    def test_send_and_receive(self, server: UdpServerSocket) -> None:
        """
        Datagrams arrive whole and in order on loopback.
        """
        host, port = server.address()
        result, client = UdpClientSocket.create(host, port)
        assert result
        assert client is not None

        messages = [b"Hello world!", bytes(range(256)) * 5, b"\x00" * 1464]
        for message in messages:
            assert client.send(message)

        for message in messages:
            status, data, sender = server.recv_datagram()
            assert status == RecvStatus.OK
            assert data == message
            assert sender is not None
            assert sender[0] == "127.0.0.1"

        client.close()

    def test_timeout(self, server: UdpServerSocket) -> None:
        """
        Nothing sent, receive times out.
        """
        status, data, sender = server.recv_datagram()

        assert status == RecvStatus.TIMEOUT
        assert data is None
        assert sender is None

    def test_non_positive_timeout(self) -> None:
        """
        A receive timeout is required.
        """
        result, instance = UdpServerSocket.create("127.0.0.1", 0, recv_timeout_s=0)

        assert not result
        assert instance is None

    def test_port_in_use(self, server: UdpServerSocket) -> None:
        """
        Binding a taken port fails.
        """
        _, port = server.address()

        result, instance = UdpServerSocket.create("127.0.0.1", port)

        assert not result
        assert instance is None

    def test_receive_buffer(self) -> None:
        """
        A requested receive buffer is at least partly granted.
        """
        result, instance = UdpServerSocket.create("127.0.0.1", 0, rcvbuf_bytes=65_536)
        assert result
        assert instance is not None

        assert instance.rcvbuf_bytes() >= 65_536 // 2

        instance.close()

    def test_unresolvable_host(self) -> None:
        """
        Client creation fails on a name that does not resolve.
        """
        result, instance = UdpClientSocket.create("no-such-host.invalid", 2055)

        assert not result
        assert instance is None
