"""Forge simulator producing append-only series of synthetic archive exports."""

from pvdb.simulation.forge import SimulatedOrigin, export_at, simulate_origin, synthesize
from pvdb.simulation.rng import CounterRng

__all__ = ["CounterRng", "SimulatedOrigin", "export_at", "simulate_origin", "synthesize"]
