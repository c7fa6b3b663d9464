"""Graph generator and dataset reports."""

from .extract import dataset_origin_list, extract_subgraph, verify_dataset
from .reports import (
    DiffReport,
    add_total,
    diff_lists,
    forge_census,
    forge_delta,
    forge_matrix,
    forge_stats,
    host_of,
)

__all__ = [
    "DiffReport",
    "add_total",
    "dataset_origin_list",
    "diff_lists",
    "extract_subgraph",
    "forge_census",
    "forge_delta",
    "forge_matrix",
    "forge_stats",
    "host_of",
    "verify_dataset",
]
