"""
Rate engine module exports.
"""

from .analysis_result import AnalysisResult, FlowClass, HostKey
from .filter_params import FilterParams
from .rate_engine import (
    LookupVariant,
    aggregate,
    attribute,
    classify,
    classify_rows,
    flow_rate,
    reference_aggregate,
)
from .rate_histogram import (
    BUCKET_COUNT,
    BUCKET_WIDTH_BPS,
    OVERFLOW_BUCKET,
    RATE_CAP_BPS,
    RateHistogram,
    RateStats,
    bucket_index,
    bucket_median_bps,
    median_from_histogram,
)

__all__ = [
    "AnalysisResult",
    "FlowClass",
    "HostKey",
    "FilterParams",
    "LookupVariant",
    "aggregate",
    "attribute",
    "classify",
    "classify_rows",
    "flow_rate",
    "reference_aggregate",
    "BUCKET_COUNT",
    "BUCKET_WIDTH_BPS",
    "OVERFLOW_BUCKET",
    "RATE_CAP_BPS",
    "RateHistogram",
    "RateStats",
    "bucket_index",
    "bucket_median_bps",
    "median_from_histogram",
]
