"""Rendering and export helpers for report tables."""

from pvdb.reporting import export, render

__all__ = ["export", "render"]
