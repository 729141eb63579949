"""
Structured-array layout for bulk flow records.

A row is 64 bytes, big-endian: resolved ``start_ms`` and ``end_ms`` (8 bytes each) followed by
the 48-byte wire record. The same layout backs the flow store and the archive file body.
"""

from typing import List

import numpy as np

from . import netflow_codec


RAW_RECORD_DTYPE = np.dtype(
    [
        ("src_addr", ">u4"),
        ("dst_addr", ">u4"),
        ("next_hop", ">u4"),
        ("input_if", ">u2"),
        ("output_if", ">u2"),
        ("d_pkts", ">u4"),
        ("d_octets", ">u4"),
        ("first", ">u4"),
        ("last", ">u4"),
        ("src_port", ">u2"),
        ("dst_port", ">u2"),
        ("pad1", "u1"),
        ("tcp_flags", "u1"),
        ("protocol", "u1"),
        ("tos", "u1"),
        ("src_as", ">u2"),
        ("dst_as", ">u2"),
        ("src_mask", "u1"),
        ("dst_mask", "u1"),
        ("pad2", ">u2"),
    ]
)

FLOW_ROW_DTYPE = np.dtype([("start_ms", ">i8"), ("end_ms", ">i8")] + RAW_RECORD_DTYPE.descr)

RAW_FIELDS = RAW_RECORD_DTYPE.names
FLOW_ROW_SIZE = FLOW_ROW_DTYPE.itemsize

assert RAW_RECORD_DTYPE.itemsize == netflow_codec.RECORD_SIZE
assert FLOW_ROW_SIZE == 64


def empty_rows(count: int = 0) -> np.ndarray:
    """
    Zeroed row array of the given length.
    """
    return np.zeros(count, dtype=FLOW_ROW_DTYPE)


def records_to_rows(records: List[netflow_codec.FlowRecord]) -> np.ndarray:
    """
    Convert resolved records to rows.

    Parameters
    ----------
    records : List[netflow_codec.FlowRecord]
        Records to convert.

    Returns
    -------
    np.ndarray
        Row array with one row per record, same order.
    """
    return np.array(
        [(record.start_ms, record.end_ms, *record.raw) for record in records],
        dtype=FLOW_ROW_DTYPE,
    )


def rows_to_records(rows: np.ndarray) -> List[netflow_codec.FlowRecord]:
    """
    Convert rows back to resolved records.

    Parameters
    ----------
    rows : np.ndarray
        Row array.

    Returns
    -------
    List[netflow_codec.FlowRecord]
        One record per row.
    """
    records = []
    for row in rows.tolist():
        start_ms, end_ms, *raw_fields = row
        records.append(
            netflow_codec.FlowRecord(netflow_codec.RawFlowRecord(*raw_fields), start_ms, end_ms)
        )

    return records


def packet_to_rows(datagram: bytes, header: netflow_codec.ExportHeader) -> np.ndarray:
    """
    Resolve a validated datagram straight into rows, dropping unacceptable records.

    Performs the same arithmetic as ``netflow_codec.resolve_times`` over the whole packet.

    Parameters
    ----------
    datagram : bytes
        Datagram that already passed ``netflow_codec.decode_header``.
    header : netflow_codec.ExportHeader
        Its decoded header.

    Returns
    -------
    np.ndarray
        Rows for every record with at least one packet and one byte per packet.
    """
    raw = np.frombuffer(
        datagram, dtype=RAW_RECORD_DTYPE, count=header.count, offset=netflow_codec.HEADER_SIZE
    )

    pkts = raw["d_pkts"].astype(np.int64)
    acceptable = (pkts >= 1) & (raw["d_octets"].astype(np.int64) >= pkts)
    raw = raw[acceptable]

    rows = np.empty(len(raw), dtype=FLOW_ROW_DTYPE)
    for name in RAW_FIELDS:
        rows[name] = raw[name]

    first = raw["first"].astype(np.int64)
    last = raw["last"].astype(np.int64)
    since_first = wrap_diff_array(header.sys_uptime, first)
    rows["start_ms"] = header.export_wall_ms() - since_first
    rows["end_ms"] = rows["start_ms"].astype(np.int64) + wrap_diff_array(last, first)

    return rows


def wrap_diff_array(later: "np.ndarray | int", earlier: "np.ndarray | int") -> np.ndarray:
    """
    Vectorized ``netflow_codec.wrap_diff``.
    """
    delta = (np.asarray(later, dtype=np.int64) - np.asarray(earlier, dtype=np.int64)) & (
        netflow_codec.UINT32_MASK
    )
    return np.where(delta > netflow_codec.HALF_RANGE, 0, delta)
