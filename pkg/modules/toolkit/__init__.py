"""
Toolkit exports: scenario generation, replay, benchmarking and the command line.

The ``replay`` function stays in its module so that ``modules.toolkit.replay`` names the module.
"""

from .bench import BenchResult, bench_catalog, run_bench, synthesize_rows, time_aggregate
from .cli import main
from .replay import ReplayStats, packetize
from .scenario import (
    RateSpec,
    ScenarioSpec,
    SiteSpec,
    generate,
    generate_site_hour,
    load_scenario,
    scenario_catalog,
    scenario_from_dict,
    validate_scenario,
)

__all__ = [
    "BenchResult",
    "bench_catalog",
    "run_bench",
    "synthesize_rows",
    "time_aggregate",
    "main",
    "ReplayStats",
    "packetize",
    "RateSpec",
    "ScenarioSpec",
    "SiteSpec",
    "generate",
    "generate_site_hour",
    "load_scenario",
    "scenario_catalog",
    "scenario_from_dict",
    "validate_scenario",
]
