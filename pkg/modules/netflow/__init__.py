"""
NetFlow v5 module exports.
"""

from .netflow_codec import (
    CodecStatus,
    ExportHeader,
    ExportPacket,
    FlowRecord,
    RawFlowRecord,
    decode_packet,
    encode_packet,
    resolve_times,
    wrap_diff,
)
from .flow_array import FLOW_ROW_DTYPE, packet_to_rows, records_to_rows, rows_to_records

__all__ = [
    "CodecStatus",
    "ExportHeader",
    "ExportPacket",
    "FlowRecord",
    "RawFlowRecord",
    "decode_packet",
    "encode_packet",
    "resolve_times",
    "wrap_diff",
    "FLOW_ROW_DTYPE",
    "packet_to_rows",
    "records_to_rows",
    "rows_to_records",
]
