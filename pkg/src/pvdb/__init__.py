"""Top-level package for pvdb.

pvdb builds repository datasets from an append-only, content-addressed
archive of version-control metadata and re-extracts them from a
fingerprint made of a query and a timestamp.
"""
