"""Residential PV-battery simulation and design optimisation."""

from ._engine import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
