"""
Hourly monitoring loop: snapshot the store, aggregate, report and drive the warning rule.
"""

import enum
import pathlib
import threading
import time
from typing import Any, Callable, Dict, List, Optional, Tuple

from ..flow_store import archive
from ..flow_store import flow_store
from ..logger import logger
from ..rate_engine import filter_params
from ..rate_engine import rate_engine
from ..site_catalog import site_catalog
from . import hourly_report
from . import warning_state


DEFAULT_CYCLE_SECONDS = 3600
ARCHIVE_SUFFIX = ".flowarc"


class CycleStatus(enum.Enum):
    """
    Outcome of one monitoring cycle.

    Attributes
    ----------
    OK : int
        Window analyzed, report written, state committed.
    NOT_DUE : int
        No full window has elapsed since the last cycle.
    ANALYSIS_FAILURE : int
        Snapshot or aggregation failed; state untouched.
    REPORT_FAILURE : int
        Report could not be written; state untouched.
    """

    OK = 0
    NOT_DUE = 1
    ANALYSIS_FAILURE = 2
    REPORT_FAILURE = 3


def replay_reports(
    reports: List[hourly_report.HourlyReport],
    threshold_bps: float = warning_state.DEFAULT_THRESHOLD_BPS,
) -> List[warning_state.SiteWarning]:
    """
    Re-derive warnings from an ordered sequence of reports, starting from empty streaks.

    Parameters
    ----------
    reports : List[hourly_report.HourlyReport]
        Reports in window order.
    threshold_bps : float, optional
        Warning threshold, by default 1 Mbps.

    Returns
    -------
    List[warning_state.SiteWarning]
        Every warning in window order, then site id order.
    """
    state = warning_state.WarningState()
    warnings = []
    for report in reports:
        for site in sorted(report.sites, key=lambda site: site.site_id):
            warning = state.observe(
                site.site_id,
                report.window,
                site.stats.median_bps,
                site.stats.flow_count,
                threshold_bps,
            )
            if warning is not None:
                warnings.append(warning)

    return warnings


class NetPerfMonitor:
    """
    Runs one analysis cycle per elapsed window. Must not run concurrently with itself.
    """

    __create_key = object()

    @classmethod
    def create(
        cls,
        store: flow_store.FlowStore,
        catalog: site_catalog.SiteCatalog,
        params: filter_params.FilterParams,
        report_directory: Optional[pathlib.Path],
        local_logger: logger.Logger,
        threshold_bps: float = warning_state.DEFAULT_THRESHOLD_BPS,
        cycle_seconds: int = DEFAULT_CYCLE_SECONDS,
        workers: int = 1,
        archive_directory: Optional[pathlib.Path] = None,
        clock: Callable[[], float] = time.time,
        metrics_source: Optional[Callable[[], Dict[str, Any]]] = None,
    ) -> Tuple[bool, Optional["NetPerfMonitor"]]:
        """
        Set up a monitor.

        Parameters
        ----------
        store : flow_store.FlowStore
            Store the collector appends to.
        catalog : site_catalog.SiteCatalog
            Registered sites.
        params : filter_params.FilterParams
            Classification thresholds.
        report_directory : Optional[pathlib.Path]
            Where hourly reports are written; None keeps them in memory only.
        local_logger : logger.Logger
            Logger.
        threshold_bps : float, optional
            Site medians below this are bad hours, by default 1 Mbps.
        cycle_seconds : int, optional
            Window length, by default 3600.
        workers : int, optional
            Aggregation worker threads, by default 1.
        archive_directory : Optional[pathlib.Path], optional
            If set, analyzed records are flushed to an archive here after each cycle.
        clock : Callable[[], float], optional
            Seconds since the epoch, by default ``time.time``.
        metrics_source : Optional[Callable[[], Dict[str, Any]]], optional
            Returns the collector metrics snapshot to embed in reports.

        Returns
        -------
        Tuple[bool, Optional[NetPerfMonitor]]
            Success status and the monitor.
        """
        if threshold_bps <= 0:
            local_logger.error(f"Warning threshold must be positive, got {threshold_bps}")
            return False, None

        if cycle_seconds <= 0:
            local_logger.error(f"Cycle length must be positive, got {cycle_seconds}")
            return False, None

        if workers < 1:
            local_logger.error(f"Worker count must be at least 1, got {workers}")
            return False, None

        return True, NetPerfMonitor(
            cls.__create_key,
            store,
            catalog,
            params,
            report_directory,
            local_logger,
            threshold_bps,
            cycle_seconds,
            workers,
            archive_directory,
            clock,
            metrics_source,
        )

    def __init__(
        self,
        class_private_create_key: object,
        store: flow_store.FlowStore,
        catalog: site_catalog.SiteCatalog,
        params: filter_params.FilterParams,
        report_directory: Optional[pathlib.Path],
        local_logger: logger.Logger,
        threshold_bps: float,
        cycle_seconds: int,
        workers: int,
        archive_directory: Optional[pathlib.Path],
        clock: Callable[[], float],
        metrics_source: Optional[Callable[[], Dict[str, Any]]],
    ) -> None:
        """
        Private constructor, use create() method.
        """
        assert class_private_create_key is NetPerfMonitor.__create_key, "Use create() method."

        self.__store = store
        self.__catalog = catalog
        self.__params = params
        self.__report_directory = report_directory
        self.__logger = local_logger
        self.__threshold_bps = threshold_bps
        self.__cycle_ms = cycle_seconds * 1000
        self.__workers = workers
        self.__archive_directory = archive_directory
        self.__clock = clock
        self.__metrics_source = metrics_source

        self.state = warning_state.WarningState()
        self.__next_window_start_ms: Optional[int] = None

    @property
    def next_window_start_ms(self) -> Optional[int]:
        """
        Start of the next window to analyze, None before the first cycle.
        """
        return self.__next_window_start_ms

    def __now_ms(self) -> int:
        return int(self.__clock() * 1000)

    def pending_window(self) -> Optional[Tuple[int, int]]:
        """
        Window the next cycle would analyze, None if no window boundary has passed.

        The window ends at the latest boundary and starts where the last successful cycle ended,
        so a failed cycle's window is covered by the next one.
        """
        end_ms = self.__now_ms() // self.__cycle_ms * self.__cycle_ms
        start_ms = self.__next_window_start_ms
        if start_ms is None:
            start_ms = end_ms - self.__cycle_ms

        if end_ms <= start_ms:
            return None

        return start_ms, end_ms

    def run_cycle(self) -> Tuple[CycleStatus, Optional[hourly_report.HourlyReport]]:
        """
        Analyze the pending window, write its report, then commit the warning state.

        Returns
        -------
        Tuple[CycleStatus, Optional[hourly_report.HourlyReport]]
            Status and the report (None unless OK).
        """
        window = self.pending_window()
        if window is None:
            return CycleStatus.NOT_DUE, None

        start_ms, end_ms = window
        result, view = self.__store.snapshot(start_ms, end_ms)
        if not result:
            self.__logger.error(f"Snapshot of window {window} failed")
            return CycleStatus.ANALYSIS_FAILURE, None

        # Get Pylance to stop complaining
        assert view is not None

        try:
            analysis = rate_engine.aggregate(
                view, self.__catalog, self.__params, workers=self.__workers
            )
        except (ValueError, MemoryError, RuntimeError) as exception:
            self.__logger.error(f"Aggregation of window {window} failed: {exception}")
            return CycleStatus.ANALYSIS_FAILURE, None

        candidate_state = self.state.copy()
        warnings = warning_state.evaluate_warnings(analysis, candidate_state, self.__threshold_bps)

        metrics = self.__metrics_source() if self.__metrics_source is not None else None
        report = hourly_report.HourlyReport.from_result(
            analysis, self.__catalog, warnings, candidate_state, metrics
        )

        report_path = None
        if self.__report_directory is not None:
            result, report_path = hourly_report.write_report(report, self.__report_directory)
            if not result:
                self.__logger.error(f"Report of window {window} could not be written")
                return CycleStatus.REPORT_FAILURE, None

        self.state = candidate_state
        self.__next_window_start_ms = end_ms
        self.__store.mark_analyzed(end_ms)

        self.__logger.info(
            f"Window {window}: {report.records_analyzed} records, {len(report.sites)} sites, "
            f"{len(warnings)} warnings, report {report_path}"
        )
        for warning in warnings:
            name = self.__catalog.site_name(warning.site_id)
            self.__logger.warning(
                f"Site {name}: median {warning.median_bps / 1e6:.3f} Mbps below "
                f"{self.__threshold_bps / 1e6:.3f} Mbps for {warning.consecutive_bad_hours} hours"
            )

        self.__flush(report.file_name().removesuffix(hourly_report.REPORT_SUFFIX))

        return CycleStatus.OK, report

    def __flush(self, stamp: str) -> None:
        if self.__archive_directory is None:
            return

        try:
            self.__archive_directory.mkdir(parents=True, exist_ok=True)
        except OSError as exception:
            self.__logger.error(f"Could not create archive directory: {exception}")
            return

        file_path = pathlib.Path(self.__archive_directory, stamp + ARCHIVE_SUFFIX)
        status, flushed = self.__store.flush(file_path)
        if status == archive.ArchiveStatus.OK:
            self.__logger.info(f"Flushed {flushed} records to {file_path}")
        elif status != archive.ArchiveStatus.NOTHING_TO_FLUSH:
            self.__logger.error(f"Flush to {file_path} failed: {status.name}")

    def run_forever(self, stop_event: threading.Event) -> None:
        """
        Run a cycle at every window boundary until the event is set.

        Parameters
        ----------
        stop_event : threading.Event
            Set to stop; checked while waiting for the next boundary.
        """
        while not stop_event.is_set():
            now_ms = self.__now_ms()
            next_boundary_ms = (now_ms // self.__cycle_ms + 1) * self.__cycle_ms
            if stop_event.wait((next_boundary_ms - now_ms) / 1000):
                break

            status, _ = self.run_cycle()
            if status not in (CycleStatus.OK, CycleStatus.NOT_DUE):
                self.__logger.warning(f"Cycle failed with {status.name}, retrying next boundary")
