"""
Collector module exports.
"""

from .collector_metrics import (
    CollectorMetrics,
    MetricsCounter,
    read_metrics,
    read_socket_drops,
    write_metrics,
)
from .flow_collector import DEFAULT_PORT, DEFAULT_RCVBUF_BYTES, FlowCollector
from .sequence_tracker import SequenceTracker

__all__ = [
    "CollectorMetrics",
    "MetricsCounter",
    "read_metrics",
    "read_socket_drops",
    "write_metrics",
    "DEFAULT_PORT",
    "DEFAULT_RCVBUF_BYTES",
    "FlowCollector",
    "SequenceTracker",
]
