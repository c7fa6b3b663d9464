"""Persistence: exchange-format archives, origin lists and JSON documents."""

from pvdb.store.documents import load_fingerprint, load_sim_params, save_fingerprint
from pvdb.store.exchange import (
    FILE_SUFFIX,
    LoadedArchive,
    load_archive,
    load_dataset,
    load_source,
    read_archive,
    save_archive,
    save_dataset,
)
from pvdb.store.lists import load_origin_list, parse_origin_list, render_origin_list, save_origin_list

__all__ = [
    "FILE_SUFFIX",
    "LoadedArchive",
    "load_archive",
    "load_dataset",
    "load_fingerprint",
    "load_origin_list",
    "load_sim_params",
    "load_source",
    "parse_origin_list",
    "read_archive",
    "render_origin_list",
    "save_archive",
    "save_dataset",
    "save_fingerprint",
    "save_origin_list",
]
