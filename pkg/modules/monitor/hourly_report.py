"""
Hourly report: serializable summary of one monitoring cycle.
"""

import datetime
import ipaddress
import json
import pathlib
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

from ..rate_engine import analysis_result
from ..rate_engine import rate_histogram
from ..site_catalog import site_catalog
from . import warning_state


REPORT_NAME_FORMAT = "%Y%m%dT%HZ"
SUB_HOUR_NAME_FORMAT = "%Y%m%dT%H%M%SZ"
HOUR_MS = 3_600_000
REPORT_SUFFIX = ".json"


def stats_to_dict(stats: rate_histogram.RateStats) -> Dict[str, Any]:
    """
    Report form of rate stats.
    """
    return {
        "max": stats.max_bps,
        "min": stats.min_bps,
        "avg": stats.avg_bps,
        "median": stats.median_bps,
        "flows": stats.flow_count,
    }


def stats_from_dict(values: Dict[str, Any]) -> rate_histogram.RateStats:
    """
    Inverse of ``stats_to_dict``.
    """
    return rate_histogram.RateStats(
        max_bps=float(values["max"]),
        min_bps=float(values["min"]),
        avg_bps=float(values["avg"]),
        median_bps=float(values["median"]),
        flow_count=int(values["flows"]),
    )


class HostReport(NamedTuple):
    """
    Stats of one host.
    """

    address: str
    stats: rate_histogram.RateStats


class SiteReport(NamedTuple):
    """
    Stats of one site, its hosts and its sparse rate distribution.

    Attributes
    ----------
    site_id : int
    name : str
    stats : rate_histogram.RateStats
    hosts : List[HostReport]
        In address order.
    buckets : List[Tuple[int, int]]
        (bucket, count) for every non-empty bucket, ascending.
    warning : bool
        Whether a warning was issued for the site in this window.
    consecutive_bad_hours : int
        Streak after this window.
    """

    site_id: int
    name: str
    stats: rate_histogram.RateStats
    hosts: List[HostReport]
    buckets: List[Tuple[int, int]]
    warning: bool
    consecutive_bad_hours: int


class HourlyReport(NamedTuple):
    """
    Everything one cycle produced.
    """

    window: Tuple[int, int]
    sites: List[SiteReport]
    tallies: Dict[str, int]
    params: Dict[str, Any]
    warnings: List[warning_state.SiteWarning]
    records_analyzed: int
    collector_metrics: Optional[Dict[str, Any]] = None

    @classmethod
    def from_result(
        cls,
        result: analysis_result.AnalysisResult,
        catalog: site_catalog.SiteCatalog,
        warnings: List[warning_state.SiteWarning],
        state: warning_state.WarningState,
        collector_metrics: Optional[Dict[str, Any]] = None,
    ) -> "HourlyReport":
        """
        Assemble the report of one window.

        Parameters
        ----------
        result : analysis_result.AnalysisResult
            Analysis of the window.
        catalog : site_catalog.SiteCatalog
            Catalog the analysis used, for site names.
        warnings : List[warning_state.SiteWarning]
            Warnings issued for the window.
        state : warning_state.WarningState
            Streaks after the window.
        collector_metrics : Optional[Dict[str, Any]], optional
            Collector metrics snapshot at cycle time, by default None.

        Returns
        -------
        HourlyReport
            The report.
        """
        warned = {warning.site_id for warning in warnings}
        sites = []
        for site_id in sorted(result.site_stats):
            histogram = result.site_histogram(site_id)

            # Get Pylance to stop complaining
            assert histogram is not None

            nonzero = histogram.buckets.nonzero()[0]
            name = catalog.site_name(site_id)
            sites.append(
                SiteReport(
                    site_id=site_id,
                    name=name if name is not None else str(site_id),
                    stats=result.site_stats[site_id],
                    hosts=[
                        HostReport(
                            str(ipaddress.IPv4Address(host)), result.host_stats[(site, host)]
                        )
                        for site, host in result.hosts_of_site(site_id)
                    ],
                    buckets=[(int(bucket), int(histogram.buckets[bucket])) for bucket in nonzero],
                    warning=site_id in warned,
                    consecutive_bad_hours=state.streak(site_id).consecutive_bad_hours,
                )
            )

        return cls(
            window=result.window,
            sites=sites,
            tallies={flow_class.name: count for flow_class, count in result.tallies.items()},
            params=result.params.to_dict(),
            warnings=list(warnings),
            records_analyzed=result.records_analyzed,
            collector_metrics=collector_metrics,
        )

    def site(self, name: str) -> Optional[SiteReport]:
        """
        Site entry by name, None if the site had no forward flows.
        """
        for site in self.sites:
            if site.name == name:
                return site

        return None

    def file_name(self) -> str:
        """
        ``YYYYMMDDTHHZ.json`` from the window start in UTC, or ``YYYYMMDDTHHMMSSZ.json`` when
        the window is not one whole clock hour.
        """
        start_ms, end_ms = self.window
        start = datetime.datetime.fromtimestamp(start_ms / 1000, tz=datetime.timezone.utc)
        if start_ms % HOUR_MS == 0 and end_ms - start_ms == HOUR_MS:
            return start.strftime(REPORT_NAME_FORMAT) + REPORT_SUFFIX

        return start.strftime(SUB_HOUR_NAME_FORMAT) + REPORT_SUFFIX

    def to_dict(self) -> Dict[str, Any]:
        """
        JSON-compatible form.
        """
        return {
            "window": list(self.window),
            "sites": [
                {
                    "site_id": site.site_id,
                    "name": site.name,
                    "stats": stats_to_dict(site.stats),
                    "hosts": [
                        {"address": host.address, "stats": stats_to_dict(host.stats)}
                        for host in site.hosts
                    ],
                    "buckets": [list(pair) for pair in site.buckets],
                    "warning": site.warning,
                    "consecutive_bad_hours": site.consecutive_bad_hours,
                }
                for site in self.sites
            ],
            "tallies": dict(self.tallies),
            "params": dict(self.params),
            "warnings": [warning.to_dict() for warning in self.warnings],
            "records_analyzed": self.records_analyzed,
            "collector_metrics": self.collector_metrics,
        }

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> Tuple[bool, Optional["HourlyReport"]]:
        """
        Rebuild from ``to_dict`` output.

        Returns
        -------
        Tuple[bool, Optional[HourlyReport]]
            Success status and the report; fails on missing or malformed fields.
        """
        try:
            start_ms, end_ms = values["window"]
            sites = [
                SiteReport(
                    site_id=int(site["site_id"]),
                    name=str(site["name"]),
                    stats=stats_from_dict(site["stats"]),
                    hosts=[
                        HostReport(str(host["address"]), stats_from_dict(host["stats"]))
                        for host in site["hosts"]
                    ],
                    buckets=[(int(bucket), int(count)) for bucket, count in site["buckets"]],
                    warning=bool(site["warning"]),
                    consecutive_bad_hours=int(site["consecutive_bad_hours"]),
                )
                for site in values["sites"]
            ]
            report = cls(
                window=(int(start_ms), int(end_ms)),
                sites=sites,
                tallies={str(name): int(count) for name, count in values["tallies"].items()},
                params=dict(values["params"]),
                warnings=[
                    warning_state.SiteWarning.from_dict(entry) for entry in values["warnings"]
                ],
                records_analyzed=int(values["records_analyzed"]),
                collector_metrics=values.get("collector_metrics"),
            )
        except (KeyError, TypeError, ValueError) as exception:
            print(f"ERROR: Malformed report: {exception}")
            return False, None

        return True, report


def write_report(
    report: HourlyReport, directory: pathlib.Path
) -> Tuple[bool, Optional[pathlib.Path]]:
    """
    Write a report as JSON into a directory, creating the directory if needed.

    Parameters
    ----------
    report : HourlyReport
        Report to write.
    directory : pathlib.Path
        Report directory.

    Returns
    -------
    Tuple[bool, Optional[pathlib.Path]]
        Success status and the path written.
    """
    file_path = pathlib.Path(directory, report.file_name())
    try:
        directory.mkdir(parents=True, exist_ok=True)
        with file_path.open("w", encoding="utf8") as file:
            json.dump(report.to_dict(), file, indent=2)
    except OSError as exception:
        print(f"ERROR: Could not write report {file_path}: {exception}")
        return False, None

    return True, file_path


def read_report(file_path: pathlib.Path) -> Tuple[bool, Optional[HourlyReport]]:
    """
    Read a report written by ``write_report``.
    """
    try:
        with file_path.open("r", encoding="utf8") as file:
            values = json.load(file)
    except (OSError, json.JSONDecodeError) as exception:
        print(f"ERROR: Could not read report {file_path}: {exception}")
        return False, None

    return HourlyReport.from_dict(values)


def read_reports(directory: pathlib.Path) -> Tuple[bool, Optional[List[HourlyReport]]]:
    """
    Read every report in a directory, ordered by window start.
    """
    reports = []
    for file_path in sorted(directory.glob("*" + REPORT_SUFFIX)):
        result, report = read_report(file_path)
        if not result:
            return False, None

        # Get Pylance to stop complaining
        assert report is not None

        reports.append(report)

    reports.sort(key=lambda report: report.window[0])
    return True, reports


def render_table(report: HourlyReport) -> str:
    """
    Human-readable summary, one line per site, rates in Mbps.
    """
    start = datetime.datetime.fromtimestamp(report.window[0] / 1000, tz=datetime.timezone.utc)
    end = datetime.datetime.fromtimestamp(report.window[1] / 1000, tz=datetime.timezone.utc)
    lines = [
        f"Window {start.isoformat()} - {end.isoformat()}: {report.records_analyzed} records, "
        + ", ".join(f"{name.lower()} {count}" for name, count in report.tallies.items()),
        f"{'site':<24}{'flows':>10}{'median':>12}{'avg':>12}{'min':>12}{'max':>12}  streak",
    ]
    for site in report.sites:
        stats = site.stats
        lines.append(
            f"{site.name:<24}{stats.flow_count:>10}"
            f"{stats.median_bps / 1e6:>12.3f}{stats.avg_bps / 1e6:>12.3f}"
            f"{stats.min_bps / 1e6:>12.3f}{stats.max_bps / 1e6:>12.3f}"
            f"  {site.consecutive_bad_hours}{'  WARNING' if site.warning else ''}"
        )

    return "\n".join(lines)


def bucket_csv(site: SiteReport) -> str:
    """
    Rate distribution of a site as CSV: bucket lower bound, upper bound (bps) and flow count.
    """
    lines = ["low_bps,high_bps,flows"]
    for bucket, count in site.buckets:
        low = bucket * rate_histogram.BUCKET_WIDTH_BPS
        high: object = ""
        if bucket < rate_histogram.OVERFLOW_BUCKET:
            high = low + rate_histogram.BUCKET_WIDTH_BPS
        lines.append(f"{low},{high},{count}")

    return "\n".join(lines) + "\n"
