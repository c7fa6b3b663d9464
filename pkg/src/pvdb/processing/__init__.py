"""Pure archive algorithms: hashing, integrity checks, merging and temporal views."""

from pvdb.processing import hashing, integrity, merging, reachability, temporal

__all__ = ["hashing", "integrity", "merging", "reachability", "temporal"]
