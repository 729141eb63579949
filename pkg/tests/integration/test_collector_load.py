"""
Live collector under the design load: 463 datagrams/s of 30 records for 60 s.

Starts ``flowmon collect`` as another process and replays synthetic rows into it.
"""

import json
import os
import pathlib
import socket
import time
from typing import Generator

import pytest
from xprocess import ProcessStarter, XProcess

from modules.network.udp import UdpClientSocket
from modules.toolkit import bench
from modules.toolkit import replay


ROOT_DIR = pathlib.Path(__file__).parent.parent.parent
DESIGN_PPS = 463.0
RECORD_COUNT = 833_400  # 463 * 60 * 30
METRICS_TIMEOUT_S = 30.0


def free_udp_port() -> int:
    """
    Port the OS considers free right now.
    """
    with socket.socket(socket.AF_INET, socket.SOCK_DGRAM) as free_socket:
        free_socket.bind(("127.0.0.1", 0))
        return free_socket.getsockname()[1]


# fmt: off
@pytest.fixture
def collector(xprocess: XProcess, tmp_path: pathlib.Path) -> Generator:
    """
    Collector process listening on loopback; yields its port and metrics file.
    """
    port = free_udp_port()
    metrics_path = pathlib.Path(tmp_path, "metrics.json")
    config_path = pathlib.Path(tmp_path, "config.yaml")
    config_path.write_text(
        "\n".join(
            [
                "logger:",
                f"    directory_path: \"{pathlib.Path(tmp_path, 'logs')}\"",
                "collector:",
                "    listen_host: 127.0.0.1",
                f"    listen_port: {port}",
                "    recv_timeout_s: 0.5",
                f"    metrics_path: \"{metrics_path}\"",
                "store:",
                "    capacity: 1000000",
                f"    archive_directory: \"{pathlib.Path(tmp_path, 'archives')}\"",
                "catalog:",
                f"    path: \"{pathlib.Path(tmp_path, 'sites.txt')}\"",
            ]
        ),
        encoding="utf8",
    )

    myenv = os.environ.copy()
    myenv["PYTHONPATH"] = str(ROOT_DIR)
    myenv["PYTHONUNBUFFERED"] = "1"

    class Starter(ProcessStarter):
        """
        xprocess config to start the collector as another process.
        """

        pattern = "Listening for flow export on"
        timeout = 60
        args = [
            "python", "-m", "modules.toolkit.cli", "--config", str(config_path),
            "collect", "--no-monitor",
        ]
        env = myenv

    xprocess.ensure("flowmon_collector", Starter)

    yield port, metrics_path

    xprocess.getinfo("flowmon_collector").terminate()
# fmt: on


def wait_for_metrics(metrics_path: pathlib.Path, expected_records: int) -> dict:
    """
    Poll the periodic metrics snapshot until every record is counted or the timeout passes.
    """
    deadline = time.monotonic() + METRICS_TIMEOUT_S
    values: dict = {}
    while time.monotonic() < deadline:
        try:
            values = json.loads(metrics_path.read_text(encoding="utf8"))
        except (OSError, json.JSONDecodeError):
            values = {}

        if values.get("records_accepted", 0) >= expected_records:
            break

        time.sleep(1.0)

    return values


# Fixtures are used to setup and teardown resources for tests
# pylint: disable=redefined-outer-name
def test_design_load(collector: tuple) -> None:
    """
    Every record sent at the design rate is accepted with no sequence gaps.
    """
    port, metrics_path = collector
    _, catalog = bench.bench_catalog(100)
    assert catalog is not None
    rows = bench.synthesize_rows(RECORD_COUNT, catalog, seed=8)

    result, target = UdpClientSocket.create("127.0.0.1", port)
    assert result
    assert target is not None

    stats = replay.replay(rows, target, DESIGN_PPS)
    target.close()

    assert stats.send_failures == 0
    assert stats.datagrams_sent == RECORD_COUNT // 30
    assert stats.records_sent == RECORD_COUNT
    assert not stats.below_target

    values = wait_for_metrics(metrics_path, RECORD_COUNT)
    assert values["records_accepted"] == RECORD_COUNT
    assert values["sequence_gaps"] == 0
    assert values["decode_errors"] == 0
