"""
Thresholds that separate bulk-transfer flows from pure-ACK and administrative flows.
"""

from typing import Any, Dict, NamedTuple


class FilterParams(NamedTuple):
    """
    Flow classification thresholds.

    Attributes
    ----------
    ack_avg_size_max : float
        Flows whose average packet size is at most this many bytes are pure ACKs.
    min_packets : int
        Flows with fewer packets are administrative.
    min_duration_ms : int
        Flows shorter than this are administrative.
    """

    ack_avg_size_max: float = 96.0
    min_packets: int = 20
    min_duration_ms: int = 100

    def to_dict(self) -> Dict[str, Any]:
        """
        Plain dictionary for reports.
        """
        return self._asdict()
