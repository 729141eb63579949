"""
``flowmon`` command line: collect, register, analyze, report, generate, replay, bench, stats.

Exit codes: 0 success, 1 usage error, 2 runtime failure, 3 warnings present (``analyze``).
"""

import argparse
import pathlib
import signal
import sys
import threading
from typing import Any, List, NoReturn, Optional, Tuple

import numpy as np

from ..collector import collector_metrics
from ..collector import flow_collector
from ..flow_store import archive
from ..flow_store import flow_store
from ..flowmon_config import flowmon_config
from ..logger import logger
from ..logger import logger_main_setup
from ..monitor import hourly_report
from ..monitor import net_perf_monitor
from ..network.udp import client_socket
from ..rate_engine import filter_params
from ..site_catalog import catalog_file
from ..site_catalog import site_catalog
from . import bench
from . import replay
from . import scenario


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2
EXIT_WARNINGS = 3


class UsageError(Exception):
    """
    Raised by the parser instead of exiting, so that usage errors map to exit code 1.
    """


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")

    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")

    return value


def _listen(text: str) -> Tuple[str, int]:
    result, address = flowmon_config.parse_listen(text)
    if not result:
        raise argparse.ArgumentTypeError(f"expected host:port, got {text}")

    # Get Pylance to stop complaining
    assert address is not None

    return address


def build_parser() -> argparse.ArgumentParser:
    """
    Parser for every subcommand.
    """
    parser = _Parser(prog="flowmon", description="NetFlow v5 transfer-rate monitor")
    parser.add_argument(
        "--config",
        type=pathlib.Path,
        default=None,
        help=f"YAML configuration file (default: {flowmon_config.DEFAULT_CONFIG_PATH} if present)",
    )
    parser.add_argument("--workers", type=_positive_int, help="aggregation worker threads")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    collect = subparsers.add_parser("collect", help="receive flow export and run hourly cycles")
    collect.add_argument("--listen", type=_listen, help="host:port to receive on")
    collect.add_argument("--rcvbuf", type=_positive_int, help="socket receive buffer in bytes")
    collect.add_argument("--capacity", type=_positive_int, help="flow store capacity in records")
    collect.add_argument("--threshold", type=_positive_float, help="warning threshold in bps")
    collect.add_argument("--cycle-seconds", type=_positive_int, help="analysis window length")
    collect.add_argument("--duration", type=_positive_float, help="stop after this many seconds")
    collect.add_argument("--no-monitor", action="store_true", help="only collect and archive")

    register = subparsers.add_parser("register", help="add a site to the catalog file")
    register.add_argument("name")
    register.add_argument("cidrs", help="comma-separated CIDR list")
    register.add_argument("--catalog", type=pathlib.Path, help="catalog file to update")

    analyze = subparsers.add_parser("analyze", help="hourly analysis of archives")
    analyze.add_argument("archives", type=pathlib.Path, nargs="+")
    analyze.add_argument("--catalog", type=pathlib.Path, help="catalog file")
    analyze.add_argument("--report-dir", type=pathlib.Path, help="write hourly reports here")
    analyze.add_argument("--threshold", type=_positive_float, help="warning threshold in bps")
    analyze.add_argument("--cycle-seconds", type=_positive_int, help="analysis window length")
    analyze.add_argument("--quiet", action="store_true", help="print warnings only")

    report = subparsers.add_parser("report", help="render stored reports")
    report.add_argument("paths", type=pathlib.Path, nargs="+", help="report files or directories")
    report.add_argument("--csv", type=pathlib.Path, help="write per-site bucket CSVs here")
    report.add_argument("--site", help="only this site")
    report.add_argument("--threshold", type=_positive_float, help="re-derive warnings with this")

    generate = subparsers.add_parser("generate", help="write a synthetic scenario archive")
    generate.add_argument("scenario", type=pathlib.Path, help="scenario YAML file")
    generate.add_argument("--output", "-o", type=pathlib.Path, required=True)
    generate.add_argument("--catalog-out", type=pathlib.Path, help="also write the sites file")

    replay_parser = subparsers.add_parser("replay", help="send archives as NetFlow v5 datagrams")
    replay_parser.add_argument("archives", type=pathlib.Path, nargs="+")
    replay_parser.add_argument("--target", type=_listen, required=True, help="host:port")
    replay_parser.add_argument("--pps", type=_positive_float, default=463.0)
    replay_parser.add_argument("--max-datagrams", type=_positive_int)

    bench_parser = subparsers.add_parser("bench", help="hash versus sequential catalog search")
    bench_parser.add_argument("--records", type=_positive_int, default=5_000_000)
    bench_parser.add_argument("--sites", type=_positive_int, default=100)
    bench_parser.add_argument("--repetitions", type=_positive_int, default=3)
    bench_parser.add_argument("--seed", type=int, default=0)

    stats = subparsers.add_parser("stats", help="print the collector metrics snapshot")
    stats.add_argument("--metrics", type=pathlib.Path, help="metrics file")

    return parser


def _load_config(
    args: argparse.Namespace,
) -> Tuple[bool, Optional[flowmon_config.FlowmonConfig]]:
    if args.config is None and not flowmon_config.DEFAULT_CONFIG_PATH.exists():
        result, config = flowmon_config.config_from_dict({})
    else:
        path = args.config if args.config is not None else flowmon_config.DEFAULT_CONFIG_PATH
        result, config = flowmon_config.load_config(path)

    if not result:
        return False, None

    # Get Pylance to stop complaining
    assert config is not None

    return flowmon_config.with_overrides(
        config,
        listen=getattr(args, "listen", None),
        rcvbuf_bytes=getattr(args, "rcvbuf", None),
        workers=args.workers,
        capacity=getattr(args, "capacity", None),
        threshold_bps=getattr(args, "threshold", None),
        cycle_seconds=getattr(args, "cycle_seconds", None),
    )


def _params(config: flowmon_config.FlowmonConfig) -> filter_params.FilterParams:
    return filter_params.FilterParams(
        ack_avg_size_max=config.engine.ack_avg_size_max,
        min_packets=config.engine.min_packets,
        min_duration_ms=config.engine.min_duration_ms,
    )


def _load_catalog(
    path: pathlib.Path, local_logger: logger.Logger, missing_ok: bool
) -> Optional[site_catalog.SiteCatalog]:
    if not path.exists() and missing_ok:
        local_logger.warning(f"Catalog {path} not found, starting with no sites")
        _, catalog = site_catalog.SiteCatalog.create()
        return catalog

    result, catalog = catalog_file.load_catalog_file(path)
    if not result:
        local_logger.error(f"Could not load catalog {path}")
        return None

    return catalog


def _read_rows(paths: List[pathlib.Path], local_logger: logger.Logger) -> Optional[np.ndarray]:
    status, rows = archive.read_archives(paths)
    if status != archive.ArchiveStatus.OK:
        local_logger.error(f"Could not read archives: {status.name}")
        return None

    return rows


def command_collect(
    config: flowmon_config.FlowmonConfig, args: argparse.Namespace, local_logger: logger.Logger
) -> int:
    """
    Run the collector and, unless disabled, the hourly monitor until interrupted.
    """
    catalog = _load_catalog(config.catalog.path, local_logger, missing_ok=True)
    if catalog is None:
        return EXIT_FAILURE

    result, store = flow_store.FlowStore.create(config.store.capacity)
    if not result:
        local_logger.error(f"Could not allocate a store of {config.store.capacity} records")
        return EXIT_FAILURE

    # Get Pylance to stop complaining
    assert store is not None

    result, collector = flow_collector.FlowCollector.create(
        store,
        local_logger,
        config.collector.listen_host,
        config.collector.listen_port,
        config.collector.rcvbuf_bytes,
        config.collector.recv_timeout_s,
        config.collector.metrics_path,
    )
    if not result:
        return EXIT_FAILURE

    # Get Pylance to stop complaining
    assert collector is not None

    stop_event = threading.Event()

    def request_stop(signum: int, _: Any) -> None:
        local_logger.info(f"Signal {signum} received, stopping", False)
        stop_event.set()

    signal.signal(signal.SIGINT, request_stop)
    signal.signal(signal.SIGTERM, request_stop)

    collector.start()

    monitor = None
    if not args.no_monitor:
        result, monitor = net_perf_monitor.NetPerfMonitor.create(
            store,
            catalog,
            _params(config),
            config.monitor.report_directory,
            local_logger,
            threshold_bps=config.monitor.warn_threshold_bps,
            cycle_seconds=config.monitor.cycle_seconds,
            workers=config.engine.workers,
            archive_directory=config.store.archive_directory,
            metrics_source=lambda: collector.metrics.snapshot().to_dict(),
        )
        if not result:
            collector.shutdown()
            return EXIT_FAILURE

    if args.duration is not None:
        timer = threading.Timer(args.duration, stop_event.set)
        timer.daemon = True
        timer.start()

    if monitor is not None:
        monitor.run_forever(stop_event)
    else:
        stop_event.wait()

    collector.shutdown()
    return EXIT_OK


def command_register(
    config: flowmon_config.FlowmonConfig, args: argparse.Namespace, local_logger: logger.Logger
) -> int:
    """
    Register one site and append it to the catalog file.
    """
    path = args.catalog if args.catalog is not None else config.catalog.path
    catalog = _load_catalog(path, local_logger, missing_ok=True)
    if catalog is None:
        return EXIT_FAILURE

    cidrs = [cidr.strip() for cidr in args.cidrs.split(",") if cidr.strip() != ""]
    status, site_id = catalog.register_site(args.name, cidrs)
    if status != site_catalog.RegisterStatus.OK:
        local_logger.error(f"Could not register {args.name}: {status.name}")
        return EXIT_FAILURE

    # Get Pylance to stop complaining
    assert site_id is not None

    if not catalog_file.append_site_line(catalog.sites()[site_id], path):
        return EXIT_FAILURE

    print(f"Registered {args.name} as site {site_id} ({catalog.entry_count()} /24 entries total)")
    return EXIT_OK


def command_analyze(
    config: flowmon_config.FlowmonConfig, args: argparse.Namespace, local_logger: logger.Logger
) -> int:
    """
    Run the hourly cycle over archived rows, window by window, as the live monitor would.
    """
    path = args.catalog if args.catalog is not None else config.catalog.path
    catalog = _load_catalog(path, local_logger, missing_ok=False)
    rows = _read_rows(args.archives, local_logger)
    if catalog is None or rows is None:
        return EXIT_FAILURE

    if len(rows) == 0:
        print("No records")
        return EXIT_OK

    result, store = flow_store.FlowStore.create(len(rows))
    if not result:
        return EXIT_FAILURE

    # Get Pylance to stop complaining
    assert store is not None

    store.append_rows(rows)

    cycle_ms = config.monitor.cycle_seconds * 1000
    first_end_ms = int(rows["end_ms"].min()) // cycle_ms * cycle_ms + cycle_ms
    last_end_ms = int(rows["end_ms"].max()) // cycle_ms * cycle_ms + cycle_ms
    now_ms = [first_end_ms]

    result, monitor = net_perf_monitor.NetPerfMonitor.create(
        store,
        catalog,
        _params(config),
        args.report_dir,
        local_logger,
        threshold_bps=config.monitor.warn_threshold_bps,
        cycle_seconds=config.monitor.cycle_seconds,
        workers=config.engine.workers,
        clock=lambda: now_ms[0] / 1000,
    )
    if not result:
        return EXIT_FAILURE

    # Get Pylance to stop complaining
    assert monitor is not None

    warning_count = 0
    while now_ms[0] <= last_end_ms:
        status, report = monitor.run_cycle()
        if status != net_perf_monitor.CycleStatus.OK:
            local_logger.error(f"Cycle ending {now_ms[0]} failed: {status.name}")
            return EXIT_FAILURE

        # Get Pylance to stop complaining
        assert report is not None

        warning_count += len(report.warnings)
        if not args.quiet:
            print(hourly_report.render_table(report))
            print()

        for warning in report.warnings:
            print(
                f"WARNING {catalog.site_name(warning.site_id)}: median "
                f"{warning.median_bps / 1e6:.3f} Mbps, {warning.consecutive_bad_hours} bad hours"
            )

        now_ms[0] += cycle_ms

    return EXIT_WARNINGS if warning_count > 0 else EXIT_OK


def command_report(
    config: flowmon_config.FlowmonConfig, args: argparse.Namespace, local_logger: logger.Logger
) -> int:
    """
    Print stored reports and optionally dump per-site bucket CSVs.
    """
    reports = []
    for path in args.paths:
        if path.is_dir():
            result, loaded = hourly_report.read_reports(path)
        else:
            result, single = hourly_report.read_report(path)
            loaded = [single] if single is not None else None

        if not result or loaded is None:
            local_logger.error(f"Could not read reports from {path}")
            return EXIT_FAILURE

        reports.extend(loaded)

    reports.sort(key=lambda report: report.window[0])
    for report in reports:
        print(hourly_report.render_table(report))
        print()
        if args.csv is None:
            continue

        for site in report.sites:
            if args.site is not None and site.name != args.site:
                continue

            stamp = report.file_name().removesuffix(hourly_report.REPORT_SUFFIX)
            csv_path = pathlib.Path(args.csv, f"{stamp}_{site.name}.csv")
            try:
                args.csv.mkdir(parents=True, exist_ok=True)
                csv_path.write_text(hourly_report.bucket_csv(site), encoding="utf8")
            except OSError as exception:
                local_logger.error(f"Could not write {csv_path}: {exception}")
                return EXIT_FAILURE

    if args.threshold is not None:
        threshold = args.threshold
    else:
        threshold = config.monitor.warn_threshold_bps

    for warning in net_perf_monitor.replay_reports(reports, threshold):
        print(
            f"Replayed warning: site {warning.site_id} window {warning.window} "
            f"median {warning.median_bps / 1e6:.3f} Mbps"
        )

    return EXIT_OK


def command_generate(
    config: flowmon_config.FlowmonConfig, args: argparse.Namespace, local_logger: logger.Logger
) -> int:
    """
    Generate a scenario archive.
    """
    result, spec = scenario.load_scenario(args.scenario)
    if not result:
        return EXIT_USAGE

    # Get Pylance to stop complaining
    assert spec is not None

    rows = scenario.generate(spec)
    status = archive.write_archive(args.output, rows)
    if status != archive.ArchiveStatus.OK:
        local_logger.error(f"Could not write {args.output}: {status.name}")
        return EXIT_FAILURE

    if args.catalog_out is not None:
        _, catalog = scenario.scenario_catalog(spec)

        # Get Pylance to stop complaining
        assert catalog is not None

        if not catalog_file.save_catalog_file(catalog, args.catalog_out):
            return EXIT_FAILURE

    print(f"Wrote {len(rows)} records to {args.output}")
    return EXIT_OK


def command_replay(
    config: flowmon_config.FlowmonConfig, args: argparse.Namespace, local_logger: logger.Logger
) -> int:
    """
    Send archives to a collector.
    """
    rows = _read_rows(args.archives, local_logger)
    if rows is None:
        return EXIT_FAILURE

    host, port = args.target
    result, target = client_socket.UdpClientSocket.create(host, port)
    if not result:
        return EXIT_FAILURE

    # Get Pylance to stop complaining
    assert target is not None

    stats = replay.replay(rows, target, args.pps, max_datagrams=args.max_datagrams)
    target.close()

    print(
        f"Sent {stats.datagrams_sent} datagrams ({stats.records_sent} records) in "
        f"{stats.elapsed_s:.2f} s: {stats.achieved_pps:.1f} pps of {stats.requested_pps:.1f} "
        "requested" + (" (BELOW TARGET)" if stats.below_target else "")
    )
    return EXIT_FAILURE if stats.send_failures > 0 else EXIT_OK


def command_bench(
    config: flowmon_config.FlowmonConfig, args: argparse.Namespace, local_logger: logger.Logger
) -> int:
    """
    Time both catalog searches over the same synthetic rows.
    """
    result, catalog = bench.bench_catalog(args.sites)
    if not result:
        return EXIT_FAILURE

    # Get Pylance to stop complaining
    assert catalog is not None

    rows = bench.synthesize_rows(args.records, catalog, args.seed)
    identical, results = bench.run_bench(
        rows, catalog, _params(config), args.repetitions, config.engine.workers
    )
    for bench_result in results:
        print(bench_result)

    if not identical:
        local_logger.error("Hash and sequential variants produced different results")
        return EXIT_FAILURE

    return EXIT_OK


def command_stats(
    config: flowmon_config.FlowmonConfig, args: argparse.Namespace, local_logger: logger.Logger
) -> int:
    """
    Print the collector's last metrics snapshot.
    """
    path = args.metrics if args.metrics is not None else config.collector.metrics_path
    result, metrics = collector_metrics.read_metrics(path)
    if not result:
        local_logger.error(f"Could not read metrics from {path}")
        return EXIT_FAILURE

    # Get Pylance to stop complaining
    assert metrics is not None

    for name, value in metrics.to_dict().items():
        print(f"{name:<20}{'n/a' if value is None else value}")

    return EXIT_OK


COMMANDS = {
    "collect": command_collect,
    "register": command_register,
    "analyze": command_analyze,
    "report": command_report,
    "generate": command_generate,
    "replay": command_replay,
    "bench": command_bench,
    "stats": command_stats,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point.

    Parameters
    ----------
    argv : Optional[List[str]], optional
        Arguments without the program name, by default ``sys.argv[1:]``.

    Returns
    -------
    int
        Exit code.
    """
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exception:
        print(f"flowmon: error: {exception}", file=sys.stderr)
        return EXIT_USAGE

    result, config = _load_config(args)
    if not result:
        return EXIT_USAGE

    # Get Pylance to stop complaining
    assert config is not None

    if args.command == "collect":
        result, local_logger, _ = logger_main_setup.setup_main_logger(config._asdict())
    else:
        result, local_logger = logger.Logger.create(args.command, False, config.logger)

    if not result:
        return EXIT_FAILURE

    # Get Pylance to stop complaining
    assert local_logger is not None

    return COMMANDS[args.command](config, args, local_logger)


if __name__ == "__main__":
    sys.exit(main())
