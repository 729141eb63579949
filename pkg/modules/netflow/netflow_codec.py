"""
Encoding and decoding of NetFlow v5 export packets.

A datagram is a 24-byte header followed by ``count`` 48-byte flow records, all big-endian.
Record timestamps are exporter uptime milliseconds; ``resolve_times`` anchors them to the
wall clock carried by the header.
"""

import enum
import ipaddress
import struct
from typing import List, NamedTuple, Optional, Tuple


NETFLOW_VERSION = 5
MAX_RECORDS_PER_PACKET = 30  # 24 + 30 * 48 = 1464 bytes fits a 1500-byte datagram

HEADER_FORMAT = "!HHIIIIBBH"  # 2 + 2 + 4 * 4 + 1 + 1 + 2 = 24 bytes
RECORD_FORMAT = "!IIIHHIIIIHHBBBBHHBBH"  # 48 bytes, both pad fields kept for byte identity
HEADER_SIZE = struct.calcsize(HEADER_FORMAT)
RECORD_SIZE = struct.calcsize(RECORD_FORMAT)

UINT32_MODULUS = 2**32
UINT32_MASK = UINT32_MODULUS - 1
HALF_RANGE = 2**31


class CodecStatus(enum.Enum):
    """
    Outcome of encoding or decoding a NetFlow v5 packet.

    Attributes
    ----------
    OK : int
        Packet is valid.
    BAD_VERSION : int
        Version field is not 5.
    TRUNCATED : int
        Datagram length is not exactly 24 + 48 * count.
    BAD_COUNT : int
        Record count is 0, above 30, or does not match the records given.
    FIELD_OUT_OF_RANGE : int
        A field value does not fit its wire width.
    """

    OK = 0
    BAD_VERSION = 1
    TRUNCATED = 2
    BAD_COUNT = 3
    FIELD_OUT_OF_RANGE = 4


class ExportHeader(NamedTuple):
    """
    NetFlow v5 export header.
    """

    version: int = NETFLOW_VERSION
    count: int = 0
    sys_uptime: int = 0
    unix_secs: int = 0
    unix_nsecs: int = 0
    flow_sequence: int = 0
    engine_type: int = 0
    engine_id: int = 0
    sampling_interval: int = 0

    def export_wall_ms(self) -> int:
        """
        Wall-clock time of the export in milliseconds since the epoch.
        """
        return self.unix_secs * 1000 + self.unix_nsecs // 1_000_000


class RawFlowRecord(NamedTuple):
    """
    One NetFlow v5 flow record as laid out on the wire.

    Addresses are unsigned 32-bit integers; ``first`` and ``last`` are exporter uptime
    milliseconds.
    """

    src_addr: int = 0
    dst_addr: int = 0
    next_hop: int = 0
    input_if: int = 0
    output_if: int = 0
    d_pkts: int = 0
    d_octets: int = 0
    first: int = 0
    last: int = 0
    src_port: int = 0
    dst_port: int = 0
    pad1: int = 0
    tcp_flags: int = 0
    protocol: int = 0
    tos: int = 0
    src_as: int = 0
    dst_as: int = 0
    src_mask: int = 0
    dst_mask: int = 0
    pad2: int = 0

    def is_acceptable(self) -> bool:
        """
        Whether the record may enter the flow store (at least one packet, one byte per packet).
        """
        return self.d_pkts >= 1 and self.d_octets >= self.d_pkts

    def __str__(self) -> str:
        src = ipaddress.IPv4Address(self.src_addr)
        dst = ipaddress.IPv4Address(self.dst_addr)
        return (
            f"{self.__class__.__name__}: {src}:{self.src_port} -> {dst}:{self.dst_port}, "
            f"protocol: {self.protocol}, packets: {self.d_pkts}, octets: {self.d_octets}"
        )


class FlowRecord(NamedTuple):
    """
    Flow record with start and end anchored to wall-clock milliseconds.
    """

    raw: RawFlowRecord
    start_ms: int
    end_ms: int

    @property
    def duration_ms(self) -> int:
        """
        Flow duration in milliseconds.
        """
        return self.end_ms - self.start_ms

    @property
    def src_addr(self) -> int:
        """
        Source address.
        """
        return self.raw.src_addr

    @property
    def dst_addr(self) -> int:
        """
        Destination address.
        """
        return self.raw.dst_addr

    @property
    def d_pkts(self) -> int:
        """
        Packet count.
        """
        return self.raw.d_pkts

    @property
    def d_octets(self) -> int:
        """
        Byte count.
        """
        return self.raw.d_octets


class ExportPacket(NamedTuple):
    """
    Decoded datagram: header plus exactly ``header.count`` records.
    """

    header: ExportHeader
    records: List[RawFlowRecord]


def wrap_diff(later: int, earlier: int) -> int:
    """
    Non-negative millisecond delta between two uptime stamps under modulo 2^32 arithmetic.

    Parameters
    ----------
    later : int
        Uptime stamp expected to be the later one.
    earlier : int
        Uptime stamp expected to be the earlier one.

    Returns
    -------
    int
        ``(later - earlier) mod 2^32``, or 0 when that exceeds 2^31 (``earlier`` is actually
        after ``later``).
    """
    delta = (later - earlier) & UINT32_MASK
    if delta > HALF_RANGE:
        return 0

    return delta


def decode_header(data: bytes) -> Tuple[CodecStatus, Optional[ExportHeader]]:
    """
    Decode and validate the 24-byte header at the start of a datagram.

    Parameters
    ----------
    data : bytes
        Datagram, at least 24 bytes.

    Returns
    -------
    Tuple[CodecStatus, Optional[ExportHeader]]
        Status and header; the header is None unless the status is OK.
    """
    if len(data) < HEADER_SIZE:
        return CodecStatus.TRUNCATED, None

    header = ExportHeader(*struct.unpack_from(HEADER_FORMAT, data, 0))

    if header.version != NETFLOW_VERSION:
        return CodecStatus.BAD_VERSION, None

    if header.count == 0 or header.count > MAX_RECORDS_PER_PACKET:
        return CodecStatus.BAD_COUNT, None

    if len(data) != HEADER_SIZE + RECORD_SIZE * header.count:
        return CodecStatus.TRUNCATED, None

    return CodecStatus.OK, header


def decode_packet(datagram: bytes) -> Tuple[CodecStatus, Optional[ExportPacket]]:
    """
    Decode a NetFlow v5 datagram into its header and records.

    Parameters
    ----------
    datagram : bytes
        Raw UDP payload.

    Returns
    -------
    Tuple[CodecStatus, Optional[ExportPacket]]
        Status and decoded packet; the packet is None unless the status is OK.
    """
    status, header = decode_header(datagram)
    if status != CodecStatus.OK:
        return status, None

    # Get Pylance to stop complaining
    assert header is not None

    records = [
        RawFlowRecord(*fields)
        for fields in struct.iter_unpack(RECORD_FORMAT, datagram[HEADER_SIZE:])
    ]

    return CodecStatus.OK, ExportPacket(header, records)


def encode_packet(
    header: ExportHeader, records: List[RawFlowRecord]
) -> Tuple[CodecStatus, Optional[bytes]]:
    """
    Encode a header and its records into a NetFlow v5 datagram.

    Parameters
    ----------
    header : ExportHeader
        Header; ``count`` must equal ``len(records)``.
    records : List[RawFlowRecord]
        Between 1 and 30 records.

    Returns
    -------
    Tuple[CodecStatus, Optional[bytes]]
        Status and the ``24 + 48 * count`` byte datagram, None unless the status is OK.
    """
    if header.version != NETFLOW_VERSION:
        return CodecStatus.BAD_VERSION, None

    if header.count != len(records) or not 1 <= header.count <= MAX_RECORDS_PER_PACKET:
        return CodecStatus.BAD_COUNT, None

    try:
        parts = [struct.pack(HEADER_FORMAT, *header)]
        parts.extend(struct.pack(RECORD_FORMAT, *record) for record in records)
    except struct.error:
        return CodecStatus.FIELD_OUT_OF_RANGE, None

    return CodecStatus.OK, b"".join(parts)


def resolve_times(header: ExportHeader, record: RawFlowRecord) -> FlowRecord:
    """
    Anchor a record's uptime stamps to wall-clock milliseconds using its carrying header.

    ``start_ms`` is the export time minus the uptime elapsed since ``first``; ``end_ms`` adds
    the flow's own duration so that ``end_ms - start_ms == wrap_diff(last, first)`` always holds.

    Parameters
    ----------
    header : ExportHeader
        Header of the datagram that carried the record.
    record : RawFlowRecord
        Record to resolve.

    Returns
    -------
    FlowRecord
        The record with absolute start and end times.
    """
    start_ms = header.export_wall_ms() - wrap_diff(header.sys_uptime, record.first)
    end_ms = start_ms + wrap_diff(record.last, record.first)
    return FlowRecord(record, start_ms, end_ms)


def resolve_packet(packet: ExportPacket) -> Tuple[List[FlowRecord], int]:
    """
    Resolve every acceptable record of a packet, dropping records without packets or bytes.

    Parameters
    ----------
    packet : ExportPacket
        Decoded packet.

    Returns
    -------
    Tuple[List[FlowRecord], int]
        Resolved records and the number of rejected records.
    """
    resolved = [
        resolve_times(packet.header, record)
        for record in packet.records
        if record.is_acceptable()
    ]
    return resolved, len(packet.records) - len(resolved)
