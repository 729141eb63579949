"""
Typed configuration read from one YAML file, defaults filling whatever the file omits.
"""

import pathlib
from typing import Any, Callable, Dict, NamedTuple, Optional, Tuple

from ..read_yaml import read_yaml


DEFAULT_CONFIG_PATH = pathlib.Path("config.yaml")

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "logger": {
        "directory_path": "logs",
        "file_datetime_format": "%Y-%m-%d_%H-%M-%S",
        "format": "%(asctime)s: [%(levelname)s] %(message)s",
        "log_datetime_format": "%H:%M:%S",
    },
    "collector": {
        "listen_host": "",
        "listen_port": 2055,
        "rcvbuf_bytes": 4_194_304,
        "recv_timeout_s": 1.0,
        "metrics_path": "flowmon_metrics.json",
    },
    "store": {
        "capacity": 50_000_000,
        "archive_directory": "archives",
    },
    "engine": {
        "ack_avg_size_max": 96.0,
        "min_packets": 20,
        "min_duration_ms": 100,
        "workers": 1,
    },
    "monitor": {
        "warn_threshold_bps": 1_000_000.0,
        "cycle_seconds": 3600,
        "report_directory": "reports",
    },
    "catalog": {
        "path": "sites.txt",
    },
}


class CollectorConfig(NamedTuple):
    """
    ``collector`` section.
    """

    listen_host: str
    listen_port: int
    rcvbuf_bytes: int
    recv_timeout_s: float
    metrics_path: pathlib.Path


class StoreConfig(NamedTuple):
    """
    ``store`` section.
    """

    capacity: int
    archive_directory: pathlib.Path


class EngineConfig(NamedTuple):
    """
    ``engine`` section.
    """

    ack_avg_size_max: float
    min_packets: int
    min_duration_ms: int
    workers: int


class MonitorConfig(NamedTuple):
    """
    ``monitor`` section.
    """

    warn_threshold_bps: float
    cycle_seconds: int
    report_directory: pathlib.Path


class CatalogConfig(NamedTuple):
    """
    ``catalog`` section.
    """

    path: pathlib.Path


class FlowmonConfig(NamedTuple):
    """
    Whole configuration. ``logger`` stays a plain mapping for ``logger_main_setup``.
    """

    logger: Dict[str, Any]
    collector: CollectorConfig
    store: StoreConfig
    engine: EngineConfig
    monitor: MonitorConfig
    catalog: CatalogConfig


def _to_int(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"expected an integer, got {value!r}")

    return value


def _to_float(value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"expected a number, got {value!r}")

    return float(value)


def _to_str(value: Any) -> str:
    if not isinstance(value, str):
        raise TypeError(f"expected a string, got {value!r}")

    return value


def _to_path(value: Any) -> pathlib.Path:
    return pathlib.Path(_to_str(value))


_CONVERTERS: Dict[str, Dict[str, Callable[[Any], Any]]] = {
    "collector": {
        "listen_host": _to_str,
        "listen_port": _to_int,
        "rcvbuf_bytes": _to_int,
        "recv_timeout_s": _to_float,
        "metrics_path": _to_path,
    },
    "store": {"capacity": _to_int, "archive_directory": _to_path},
    "engine": {
        "ack_avg_size_max": _to_float,
        "min_packets": _to_int,
        "min_duration_ms": _to_int,
        "workers": _to_int,
    },
    "monitor": {
        "warn_threshold_bps": _to_float,
        "cycle_seconds": _to_int,
        "report_directory": _to_path,
    },
    "catalog": {"path": _to_path},
}


def config_from_dict(values: Dict[str, Any]) -> Tuple[bool, Optional[FlowmonConfig]]:
    """
    Build the typed configuration from a (possibly partial) mapping.

    Parameters
    ----------
    values : Dict[str, Any]
        Sections as read from YAML; unknown keys are ignored.

    Returns
    -------
    Tuple[bool, Optional[FlowmonConfig]]
        Success status and the configuration; fails on a value of the wrong type or range.
    """
    for section, entries in values.items():
        if not isinstance(entries, dict):
            print(f"ERROR: Config section {section} is not a mapping")
            return False, None

    merged = read_yaml.merge_defaults(values, DEFAULTS)

    sections = {}
    for section, converters in _CONVERTERS.items():
        converted = {}
        for key, converter in converters.items():
            try:
                converted[key] = converter(merged[section][key])
            except TypeError as exception:
                print(f"ERROR: Config key {section}.{key}: {exception}")
                return False, None

        sections[section] = converted

    config = FlowmonConfig(
        logger=merged["logger"],
        collector=CollectorConfig(**sections["collector"]),
        store=StoreConfig(**sections["store"]),
        engine=EngineConfig(**sections["engine"]),
        monitor=MonitorConfig(**sections["monitor"]),
        catalog=CatalogConfig(**sections["catalog"]),
    )

    result, message = validate(config)
    if not result:
        print(f"ERROR: {message}")
        return False, None

    return True, config


def validate(config: FlowmonConfig) -> Tuple[bool, str]:
    """
    Range checks.

    Returns
    -------
    Tuple[bool, str]
        Whether the configuration is usable, and what is wrong if not.
    """
    if not 0 <= config.collector.listen_port <= 65535:
        return False, f"listen_port out of range: {config.collector.listen_port}"

    if config.collector.rcvbuf_bytes <= 0 or config.collector.recv_timeout_s <= 0:
        return False, "rcvbuf_bytes and recv_timeout_s must be positive"

    if config.store.capacity <= 0:
        return False, f"store capacity must be positive: {config.store.capacity}"

    if config.engine.workers < 1:
        return False, f"engine workers must be at least 1: {config.engine.workers}"

    if (
        config.engine.ack_avg_size_max < 0
        or config.engine.min_packets < 0
        or config.engine.min_duration_ms < 0
    ):
        return False, "engine thresholds must be non-negative"

    if config.monitor.warn_threshold_bps <= 0 or config.monitor.cycle_seconds <= 0:
        return False, "warn_threshold_bps and cycle_seconds must be positive"

    return True, ""


def load_config(
    file_path: pathlib.Path = DEFAULT_CONFIG_PATH,
) -> Tuple[bool, Optional[FlowmonConfig]]:
    """
    Read and type the configuration file.

    Parameters
    ----------
    file_path : pathlib.Path, optional
        YAML file, by default ``config.yaml`` in the working directory.

    Returns
    -------
    Tuple[bool, Optional[FlowmonConfig]]
        Success status and the configuration.
    """
    result, values = read_yaml.open_config(file_path)
    if not result:
        return False, None

    # Get Pylance to stop complaining
    assert values is not None

    return config_from_dict(values)


def parse_listen(text: str) -> Tuple[bool, Optional[Tuple[str, int]]]:
    """
    Parse ``host:port`` (host may be empty for all interfaces).
    """
    host, separator, port_text = text.rpartition(":")
    if separator == "" or not port_text.isdigit():
        print(f"ERROR: Expected host:port, got {text}")
        return False, None

    port = int(port_text)
    if port > 65535:
        print(f"ERROR: Port out of range: {port}")
        return False, None

    return True, (host, port)


def with_overrides(
    config: FlowmonConfig,
    listen: Optional[Tuple[str, int]] = None,
    rcvbuf_bytes: Optional[int] = None,
    workers: Optional[int] = None,
    capacity: Optional[int] = None,
    threshold_bps: Optional[float] = None,
    cycle_seconds: Optional[int] = None,
) -> Tuple[bool, Optional[FlowmonConfig]]:
    """
    Apply command-line overrides; None leaves the file value.

    Returns
    -------
    Tuple[bool, Optional[FlowmonConfig]]
        Success status and the new configuration; fails if an override is out of range.
    """
    collector = config.collector
    if listen is not None:
        collector = collector._replace(listen_host=listen[0], listen_port=listen[1])

    if rcvbuf_bytes is not None:
        collector = collector._replace(rcvbuf_bytes=rcvbuf_bytes)

    engine = config.engine if workers is None else config.engine._replace(workers=workers)
    store = config.store if capacity is None else config.store._replace(capacity=capacity)

    monitor = config.monitor
    if threshold_bps is not None:
        monitor = monitor._replace(warn_threshold_bps=threshold_bps)

    if cycle_seconds is not None:
        monitor = monitor._replace(cycle_seconds=cycle_seconds)

    updated = config._replace(collector=collector, engine=engine, store=store, monitor=monitor)

    result, message = validate(updated)
    if not result:
        print(f"ERROR: {message}")
        return False, None

    return True, updated
