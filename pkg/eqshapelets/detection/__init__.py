from .base import BaseCatalogMatcher
from .catalog import read_catalog, write_catalog
from .manager import (
    DetectionManager,
    IntervalCatalogMatcher,
    build_report,
    label_windows,
    match_catalog,
    probability_histogram,
    review_band,
    write_detections,
    write_histogram,
)

__all__ = [
    "BaseCatalogMatcher",
    "DetectionManager",
    "IntervalCatalogMatcher",
    "build_report",
    "label_windows",
    "match_catalog",
    "probability_histogram",
    "read_catalog",
    "review_band",
    "write_catalog",
    "write_detections",
    "write_histogram",
]
