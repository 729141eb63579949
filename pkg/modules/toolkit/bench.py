"""
Hash-table versus sequential catalog search benchmark over ``rate_engine.aggregate``.
"""

import time
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from ..flow_store import flow_store
from ..netflow import flow_array
from ..rate_engine import analysis_result
from ..rate_engine import filter_params
from ..rate_engine import rate_engine
from ..site_catalog import site_catalog


BENCH_START_MS = 1_704_067_200_000
BENCH_WINDOW_MS = 3_600_000
MIN_ELAPSED_S = 1e-9


class BenchResult(NamedTuple):
    """
    Timing of one lookup variant.

    Attributes
    ----------
    variant : str
        ``hash`` or ``sequential``.
    record_count : int
    elapsed_ms : float
        Median over repetitions of the ``aggregate`` call alone.
    records_per_s : float
    speedup : float
        Sequential elapsed divided by this variant's elapsed.
    """

    variant: str
    record_count: int
    elapsed_ms: float
    records_per_s: float
    speedup: float

    def __str__(self) -> str:
        return (
            f"{self.variant:<12}{self.record_count:>12} records{self.elapsed_ms:>12.1f} ms"
            f"{self.records_per_s:>16,.0f} records/s{self.speedup:>8.2f}x"
        )


def bench_catalog(site_count: int) -> Tuple[bool, Optional[site_catalog.SiteCatalog]]:
    """
    Catalog of ``site_count`` sites with one distinct /24 each inside 10.0.0.0/8.
    """
    result, catalog = site_catalog.SiteCatalog.create()
    if not result:
        return False, None

    # Get Pylance to stop complaining
    assert catalog is not None

    for index in range(site_count):
        cidr = f"10.{index // 256 % 256}.{index % 256}.0/24"
        status, _ = catalog.register_site(f"site{index:05d}", [cidr])
        if status != site_catalog.RegisterStatus.OK:
            print(f"ERROR: Could not register {cidr}: {status.name}")
            return False, None

    return True, catalog


def synthesize_rows(
    record_count: int, catalog: site_catalog.SiteCatalog, seed: int = 0
) -> np.ndarray:
    """
    Forward-eligible rows with one endpoint in a random catalog subnet and the other outside.

    Parameters
    ----------
    record_count : int
        Rows to make.
    catalog : site_catalog.SiteCatalog
        Catalog with at least one entry.
    seed : int, optional
        Generator seed, by default 0.

    Returns
    -------
    np.ndarray
        Rows ending inside one hour starting at ``BENCH_START_MS``.
    """
    rng = np.random.default_rng(seed)
    entries = np.array(catalog.entry_keys(), dtype=np.int64)
    local = entries[rng.integers(0, len(entries), size=record_count)] + rng.integers(
        1, 255, size=record_count
    )
    remote = (192 << 24) + rng.integers(0, 1 << 24, size=record_count)
    outbound = rng.random(record_count) < 0.5

    duration = rng.integers(100, 60_000, size=record_count, endpoint=True)
    end_ms = BENCH_START_MS + rng.integers(0, BENCH_WINDOW_MS, size=record_count)
    packets = rng.integers(20, 10_000, size=record_count, endpoint=True)

    rows = flow_array.empty_rows(record_count)
    rows["src_addr"] = np.where(outbound, local, remote)
    rows["dst_addr"] = np.where(outbound, remote, local)
    rows["d_pkts"] = packets
    rows["d_octets"] = packets * rng.integers(100, 1500, size=record_count, endpoint=True)
    rows["end_ms"] = end_ms
    rows["start_ms"] = end_ms - duration
    rows["protocol"] = 6
    return rows


def time_aggregate(
    view: flow_store.FlowView,
    catalog: site_catalog.SiteCatalog,
    params: filter_params.FilterParams,
    variant: rate_engine.LookupVariant,
    workers: int = 1,
) -> Tuple[float, analysis_result.AnalysisResult]:
    """
    Elapsed milliseconds of one ``aggregate`` call, and its result.
    """
    start = time.perf_counter()
    result = rate_engine.aggregate(view, catalog, params, workers=workers, variant=variant)
    return (time.perf_counter() - start) * 1000.0, result


def run_bench(
    rows: np.ndarray,
    catalog: site_catalog.SiteCatalog,
    params: filter_params.FilterParams = filter_params.FilterParams(),
    repetitions: int = 3,
    workers: int = 1,
) -> Tuple[bool, List[BenchResult]]:
    """
    Time both lookup variants over the same rows and catalog.

    Parameters
    ----------
    rows : np.ndarray
        Rows to aggregate.
    catalog : site_catalog.SiteCatalog
        Catalog used by both variants.
    params : filter_params.FilterParams, optional
        Thresholds, by default the defaults.
    repetitions : int, optional
        Timed runs per variant; the median is reported. By default 3.
    workers : int, optional
        Worker threads, by default 1.

    Returns
    -------
    Tuple[bool, List[BenchResult]]
        Whether both variants produced identical results, and the hash then sequential timings.
    """
    assert repetitions >= 1

    view = flow_store.FlowView.from_rows(rows, BENCH_START_MS, BENCH_START_MS + BENCH_WINDOW_MS)
    catalog.publish()

    elapsed = {}
    results = {}
    for variant in (rate_engine.LookupVariant.HASH, rate_engine.LookupVariant.SEQUENTIAL):
        timings = []
        for _ in range(repetitions):
            milliseconds, result = time_aggregate(view, catalog, params, variant, workers)
            timings.append(milliseconds)

        elapsed[variant] = float(np.median(timings))
        results[variant] = result

    baseline = elapsed[rate_engine.LookupVariant.SEQUENTIAL]
    bench_results = [
        BenchResult(
            variant=variant.value,
            record_count=len(rows),
            elapsed_ms=milliseconds,
            records_per_s=len(rows) / max(milliseconds / 1000.0, MIN_ELAPSED_S),
            speedup=baseline / max(milliseconds, MIN_ELAPSED_S * 1000.0),
        )
        for variant, milliseconds in elapsed.items()
    ]

    identical = (
        results[rate_engine.LookupVariant.HASH] == results[rate_engine.LookupVariant.SEQUENTIAL]
    )
    return identical, bench_results
