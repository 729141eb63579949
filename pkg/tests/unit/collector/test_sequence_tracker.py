"""
Sequence gap estimation tests.
"""

from modules.collector import sequence_tracker
from modules.netflow import netflow_codec


def header(flow_sequence: int, count: int = 2) -> netflow_codec.ExportHeader:
    """
    Header with just the fields the tracker reads.
    """
    return netflow_codec.ExportHeader(count=count, flow_sequence=flow_sequence)


def test_contiguous_sequence_has_no_gap() -> None:
    """
    Each header continues where the previous one ended.
    """
    tracker = sequence_tracker.SequenceTracker()

    gaps = [tracker.track(("192.0.2.1", 0), header(sequence)) for sequence in [10, 12, 14, 16]]

    assert gaps == [0, 0, 0, 0]


def test_gap_counts_missing_records() -> None:
    """
    Skipped sequence numbers are lost records.
    """
    tracker = sequence_tracker.SequenceTracker()
    tracker.track(("192.0.2.1", 0), header(0, count=30))

    assert tracker.track(("192.0.2.1", 0), header(90, count=30)) == 60
    assert tracker.track(("192.0.2.1", 0), header(120, count=30)) == 0


def test_late_header_ignored() -> None:
    """
    A reordered or duplicate header neither counts nor moves the expectation.
    """
    tracker = sequence_tracker.SequenceTracker()
    tracker.track(("192.0.2.1", 0), header(100))

    assert tracker.track(("192.0.2.1", 0), header(100)) == 0
    assert tracker.track(("192.0.2.1", 0), header(102)) == 0


def test_sequence_wraps() -> None:
    """
    Sequence numbers continue across 2^32.
    """
    tracker = sequence_tracker.SequenceTracker()
    tracker.track(("192.0.2.1", 0), header(2**32 - 1, count=2))

    assert tracker.track(("192.0.2.1", 0), header(1)) == 0
    assert tracker.track(("192.0.2.1", 0), header(8)) == 5


def test_engines_tracked_separately() -> None:
    """
    Exporters and engine ids each keep their own sequence.
    """
    tracker = sequence_tracker.SequenceTracker()
    tracker.track(("192.0.2.1", 0), header(0))
    tracker.track(("192.0.2.1", 1), header(500))
    tracker.track(("192.0.2.2", 0), header(7))

    assert tracker.track(("192.0.2.1", 0), header(2)) == 0
    assert tracker.track(("192.0.2.1", 1), header(502)) == 0
    assert tracker.engines() == 3
