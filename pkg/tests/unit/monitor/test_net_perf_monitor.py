"""
Monitoring cycle tests with a controllable clock.
"""

import pathlib

import pytest
import pytest_mock

from modules.flow_store import flow_store
from modules.logger import logger
from modules.monitor import hourly_report
from modules.monitor import net_perf_monitor
from modules.netflow import flow_array
from modules.netflow import netflow_codec
from modules.rate_engine import filter_params
from modules.rate_engine import rate_engine
from modules.site_catalog import site_catalog
from modules.toolkit import scenario


START_MS = scenario.DEFAULT_START_MS
HOUR_MS = scenario.HOUR_MS


class FakeClock:
    """
    Clock in seconds that only moves when told to.
    """

    def __init__(self, now_ms: int) -> None:
        self.now_ms = now_ms

    def __call__(self) -> float:
        return self.now_ms / 1000

    def at_hour_end(self, hour: int) -> None:
        """
        Move to a few seconds after the end of an hour (numbered from 1).
        """
        self.now_ms = START_MS + hour * HOUR_MS + 5_000


def forward_record(end_ms: int, octets: int) -> netflow_codec.FlowRecord:
    """
    Eight-second forward flow from SiteA ending at ``end_ms``.
    """
    raw = netflow_codec.RawFlowRecord(
        src_addr=0xC0000201, dst_addr=0xC6336401, d_pkts=1_000, d_octets=octets
    )
    return netflow_codec.FlowRecord(raw, end_ms - 8_000, end_ms)


@pytest.fixture
def monitor_logger() -> logger.Logger:  # type: ignore
    """
    Logger to stdout only.
    """
    result, instance = logger.Logger.create("test_net_perf_monitor", False)
    assert result
    assert instance is not None
    yield instance


@pytest.fixture
def catalog() -> site_catalog.SiteCatalog:  # type: ignore
    """
    SiteA only.
    """
    _, instance = site_catalog.SiteCatalog.create()
    assert instance is not None
    instance.register_site("SiteA", ["192.0.2.0/24"])
    yield instance


@pytest.fixture
def store() -> flow_store.FlowStore:  # type: ignore
    """
    Two slow SiteA flows in hour 1, one in hour 2, one late in hour 3.
    """
    _, instance = flow_store.FlowStore.create(100)
    assert instance is not None
    instance.append(
        [
            forward_record(START_MS + 60_000, 500_000),
            forward_record(START_MS + 120_000, 600_000),
            forward_record(START_MS + HOUR_MS + 60_000, 400_000),
            forward_record(START_MS + 3 * HOUR_MS - 1, 300_000),
        ]
    )
    yield instance


@pytest.fixture
def clock() -> FakeClock:  # type: ignore
    """
    Clock just after the end of hour 1.
    """
    instance = FakeClock(0)
    instance.at_hour_end(1)
    yield instance


def make_monitor(
    store: flow_store.FlowStore,
    catalog: site_catalog.SiteCatalog,
    local_logger: logger.Logger,
    clock: FakeClock,
    report_directory: "pathlib.Path | None",
    archive_directory: "pathlib.Path | None" = None,
) -> net_perf_monitor.NetPerfMonitor:
    """
    Monitor over the fixtures with hourly cycles.
    """
    result, monitor = net_perf_monitor.NetPerfMonitor.create(
        store,
        catalog,
        filter_params.FilterParams(),
        report_directory,
        local_logger,
        clock=clock,
        archive_directory=archive_directory,
        metrics_source=lambda: {"records_accepted": len(store)},
    )
    assert result
    assert monitor is not None
    return monitor


# Fixtures are used to setup and teardown resources for tests
# pylint: disable=redefined-outer-name
class TestCreate:
    """
    Parameter validation.
    """

    @pytest.mark.parametrize(
        "arguments",
        [{"threshold_bps": 0}, {"cycle_seconds": 0}, {"workers": 0}],
    )
    def test_invalid(
        self,
        store: flow_store.FlowStore,
        catalog: site_catalog.SiteCatalog,
        monitor_logger: logger.Logger,
        arguments: dict,
    ) -> None:
        """
        Threshold, cycle length and workers must be positive.
        """
        result, monitor = net_perf_monitor.NetPerfMonitor.create(
            store, catalog, filter_params.FilterParams(), None, monitor_logger, **arguments
        )

        assert not result
        assert monitor is None


class TestRunCycle:
    """
    One cycle per elapsed window.
    """

    def test_cycle_then_not_due(
        self,
        store: flow_store.FlowStore,
        catalog: site_catalog.SiteCatalog,
        monitor_logger: logger.Logger,
        clock: FakeClock,
        tmp_path: pathlib.Path,
    ) -> None:
        """
        The first cycle analyzes the last full hour; a second one in the same hour does nothing.
        """
        monitor = make_monitor(store, catalog, monitor_logger, clock, tmp_path)
        assert monitor.pending_window() == (START_MS, START_MS + HOUR_MS)

        status, report = monitor.run_cycle()

        assert status == net_perf_monitor.CycleStatus.OK
        assert report is not None
        assert report.window == (START_MS, START_MS + HOUR_MS)
        assert report.records_analyzed == 2
        assert report.collector_metrics == {"records_accepted": 4}
        assert pathlib.Path(tmp_path, "20240101T00Z.json").exists()
        assert monitor.next_window_start_ms == START_MS + HOUR_MS
        assert monitor.state.streak(0).consecutive_bad_hours == 1
        assert store.watermark == 2

        status, report = monitor.run_cycle()

        assert status == net_perf_monitor.CycleStatus.NOT_DUE
        assert report is None

    def test_warning_after_two_hours(
        self,
        store: flow_store.FlowStore,
        catalog: site_catalog.SiteCatalog,
        monitor_logger: logger.Logger,
        clock: FakeClock,
    ) -> None:
        """
        Second consecutive slow hour warns.
        """
        monitor = make_monitor(store, catalog, monitor_logger, clock, None)
        monitor.run_cycle()
        clock.at_hour_end(2)

        status, report = monitor.run_cycle()

        assert status == net_perf_monitor.CycleStatus.OK
        assert report is not None
        assert len(report.warnings) == 1
        assert report.warnings[0].consecutive_bad_hours == 2
        assert report.sites[0].warning

    def test_analysis_failure_retried(
        self,
        store: flow_store.FlowStore,
        catalog: site_catalog.SiteCatalog,
        monitor_logger: logger.Logger,
        clock: FakeClock,
        mocker: pytest_mock.MockerFixture,
    ) -> None:
        """
        A failed window leaves the state alone and is covered by the next cycle.
        """
        monitor = make_monitor(store, catalog, monitor_logger, clock, None)
        monitor.run_cycle()
        clock.at_hour_end(2)

        mocker.patch.object(rate_engine, "aggregate", side_effect=MemoryError("out of memory"))
        status, report = monitor.run_cycle()
        mocker.stopall()

        assert status == net_perf_monitor.CycleStatus.ANALYSIS_FAILURE
        assert report is None
        assert monitor.state.streak(0).consecutive_bad_hours == 1
        assert monitor.next_window_start_ms == START_MS + HOUR_MS

        clock.at_hour_end(3)
        status, report = monitor.run_cycle()

        assert status == net_perf_monitor.CycleStatus.OK
        assert report is not None
        assert report.window == (START_MS + HOUR_MS, START_MS + 3 * HOUR_MS)
        assert report.records_analyzed == 2
        # The backlog is one evaluation
        assert monitor.state.streak(0).consecutive_bad_hours == 2

    def test_report_failure_not_committed(
        self,
        store: flow_store.FlowStore,
        catalog: site_catalog.SiteCatalog,
        monitor_logger: logger.Logger,
        clock: FakeClock,
        tmp_path: pathlib.Path,
    ) -> None:
        """
        If the report cannot be written, nothing advances.
        """
        blocker = pathlib.Path(tmp_path, "blocker")
        blocker.write_text("", encoding="utf8")
        monitor = make_monitor(
            store, catalog, monitor_logger, clock, pathlib.Path(blocker, "reports")
        )

        status, report = monitor.run_cycle()

        assert status == net_perf_monitor.CycleStatus.REPORT_FAILURE
        assert report is None
        assert monitor.next_window_start_ms is None
        assert monitor.state.streak(0).consecutive_bad_hours == 0
        assert store.watermark == 0

    def test_flush_after_cycle(
        self,
        store: flow_store.FlowStore,
        catalog: site_catalog.SiteCatalog,
        monitor_logger: logger.Logger,
        clock: FakeClock,
        tmp_path: pathlib.Path,
    ) -> None:
        """
        Analyzed records are archived under the window's name and leave memory.
        """
        archive_directory = pathlib.Path(tmp_path, "archives")
        monitor = make_monitor(store, catalog, monitor_logger, clock, None, archive_directory)

        monitor.run_cycle()

        assert len(store) == 2
        status, records = flow_store.load(pathlib.Path(archive_directory, "20240101T00Z.flowarc"))
        assert status.name == "OK"
        assert records is not None
        assert len(records) == 2


def run_scenario_cycles(spec: scenario.ScenarioSpec, local_logger: logger.Logger) -> list:
    """
    Generate a scenario, run one cycle per hour and collect every warning.
    """
    _, catalog = scenario.scenario_catalog(spec)
    assert catalog is not None
    rows = scenario.generate(spec)
    _, store = flow_store.FlowStore.create(len(rows))
    assert store is not None
    store.append_rows(rows)

    clock = FakeClock(0)
    monitor = make_monitor(store, catalog, local_logger, clock, None)
    warnings = []
    for hour in range(1, spec.duration_hours + 1):
        clock.at_hour_end(hour)
        status, report = monitor.run_cycle()
        assert status == net_perf_monitor.CycleStatus.OK
        assert report is not None
        warnings.extend(report.warnings)

    return warnings


@pytest.mark.parametrize(
    "dip_hours, expected_warning_hours",
    [([3], []), ([2, 3], [3]), ([2, 3, 4, 5], [3, 4, 5])],
)
def test_scenario_dips(
    monitor_logger: logger.Logger, dip_hours: list, expected_warning_hours: list
) -> None:
    """
    Only dips of two or more hours warn, once per hour from the second one on.
    """
    dip = scenario.RateSpec("fixed", 500_000.0)
    spec = scenario.ScenarioSpec(
        sites=[
            scenario.SiteSpec(
                "SiteA", "192.0.2.0/24", flows_per_hour=200, rate=scenario.RateSpec("fixed", 2e7)
            ),
            scenario.SiteSpec(
                "SiteB",
                "203.0.113.0/24",
                flows_per_hour=200,
                rate=scenario.RateSpec("lognormal", 1e7, 0.5),
                ack_fraction=0.2,
                dips={hour: dip for hour in dip_hours},
            ),
        ],
        duration_hours=6,
        seed=3,
    )

    warnings = run_scenario_cycles(spec, monitor_logger)

    assert [warning.site_id for warning in warnings] == [1] * len(expected_warning_hours)
    assert [(warning.window[0] - START_MS) // HOUR_MS + 1 for warning in warnings] == (
        expected_warning_hours
    )
    assert all(warning.median_bps == 505_000.0 for warning in warnings)


def test_replay_reports(
    store: flow_store.FlowStore,
    catalog: site_catalog.SiteCatalog,
    monitor_logger: logger.Logger,
    clock: FakeClock,
    tmp_path: pathlib.Path,
) -> None:
    """
    Warnings re-derived from stored reports match those issued live.
    """
    monitor = make_monitor(store, catalog, monitor_logger, clock, tmp_path)
    live = []
    for hour in [1, 2, 3]:
        clock.at_hour_end(hour)
        _, report = monitor.run_cycle()
        assert report is not None
        live.extend(report.warnings)

    result, reports = hourly_report.read_reports(tmp_path)
    assert result
    assert reports is not None

    assert net_perf_monitor.replay_reports(reports) == live
    assert len(live) == 2
    assert net_perf_monitor.replay_reports(reports, threshold_bps=1e5) == []
