"""
Collector metrics tests.
"""

import json
import pathlib

from modules.collector import collector_metrics


PROC_HEADER = (
    "  sl  local_address rem_address   st tx_queue rx_queue tr tm->when retrnsmt   uid  "
    "timeout inode ref pointer drops\n"
)


def proc_line(slot: int, port: int, drops: int) -> str:
    """
    One socket line in ``/proc/net/udp`` format.
    """
    return (
        f"  {slot}: 00000000:{port:04X} 00000000:0000 07 00000000:00000000 00:00000000 "
        f"00000000  1000        0 {40000 + slot} 2 0000000000000000 {drops}\n"
    )


def test_counters_accumulate() -> None:
    """
    Datagrams and decode errors both count as received.
    """
    counter = collector_metrics.MetricsCounter()

    counter.record_datagram(accepted=28, rejected=2)
    counter.record_datagram(accepted=10, dropped=20, gap=30)
    counter.record_decode_error()
    counter.set_socket_drops(4)

    assert counter.snapshot() == collector_metrics.CollectorMetrics(
        datagrams_received=3,
        records_accepted=38,
        records_rejected=2,
        records_dropped=20,
        decode_errors=1,
        sequence_gaps=30,
        socket_drops=4,
    )


def test_socket_drops_from_table(tmp_path: pathlib.Path) -> None:
    """
    The drop column of the line whose local port matches.
    """
    proc_path = pathlib.Path(tmp_path, "udp")
    proc_path.write_text(
        PROC_HEADER + proc_line(1, 53, 0) + proc_line(2, 2055, 17), encoding="utf8"
    )

    assert collector_metrics.read_socket_drops(2055, proc_path) == 17
    assert collector_metrics.read_socket_drops(53, proc_path) == 0
    assert collector_metrics.read_socket_drops(9995, proc_path) is None


def test_socket_drops_unavailable(tmp_path: pathlib.Path) -> None:
    """
    No table, no drop count.
    """
    assert collector_metrics.read_socket_drops(2055, pathlib.Path(tmp_path, "absent")) is None


def test_metrics_file(tmp_path: pathlib.Path) -> None:
    """
    The snapshot file is plain JSON and reads back.
    """
    metrics = collector_metrics.CollectorMetrics(datagrams_received=5, records_accepted=150)
    file_path = pathlib.Path(tmp_path, "run", "metrics.json")

    assert collector_metrics.write_metrics(metrics, file_path)

    values = json.loads(file_path.read_text(encoding="utf8"))
    assert values["records_accepted"] == 150
    assert values["socket_drops"] is None
    assert not pathlib.Path(tmp_path, "run", "metrics.json.tmp").exists()

    result, actual = collector_metrics.read_metrics(file_path)
    assert result
    assert actual == metrics


def test_malformed_metrics_file(tmp_path: pathlib.Path) -> None:
    """
    A file that is not a JSON object fails to read.
    """
    file_path = pathlib.Path(tmp_path, "metrics.json")
    file_path.write_text("[1, 2]", encoding="utf8")

    result, actual = collector_metrics.read_metrics(file_path)

    assert not result
    assert actual is None
