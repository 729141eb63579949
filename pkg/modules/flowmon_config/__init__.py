"""
Configuration module exports.
"""

from .flowmon_config import (
    DEFAULT_CONFIG_PATH,
    DEFAULTS,
    CatalogConfig,
    CollectorConfig,
    EngineConfig,
    FlowmonConfig,
    MonitorConfig,
    StoreConfig,
    config_from_dict,
    load_config,
    parse_listen,
    validate,
    with_overrides,
)

__all__ = [
    "DEFAULT_CONFIG_PATH",
    "DEFAULTS",
    "CatalogConfig",
    "CollectorConfig",
    "EngineConfig",
    "FlowmonConfig",
    "MonitorConfig",
    "StoreConfig",
    "config_from_dict",
    "load_config",
    "parse_listen",
    "validate",
    "with_overrides",
]
