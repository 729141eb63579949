"""
Monitor module exports.
"""

from .hourly_report import (
    HostReport,
    HourlyReport,
    SiteReport,
    bucket_csv,
    read_report,
    read_reports,
    render_table,
    write_report,
)
from .net_perf_monitor import CycleStatus, NetPerfMonitor, replay_reports
from .warning_state import (
    DEFAULT_THRESHOLD_BPS,
    SiteStreak,
    SiteWarning,
    WarningState,
    evaluate_warnings,
)

__all__ = [
    "HostReport",
    "HourlyReport",
    "SiteReport",
    "bucket_csv",
    "read_report",
    "read_reports",
    "render_table",
    "write_report",
    "CycleStatus",
    "NetPerfMonitor",
    "replay_reports",
    "DEFAULT_THRESHOLD_BPS",
    "SiteStreak",
    "SiteWarning",
    "WarningState",
    "evaluate_warnings",
]
