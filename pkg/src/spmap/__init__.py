"""Shortest path maps among polygonal obstacles via wavefront propagation."""
from __future__ import annotations

from .config import Config, DEFAULT_CONFIG
from .errors import (
    AssemblyError,
    DegeneracyWarning,
    GeometryError,
    InvalidInput,
    InvalidScene,
    NoIntersection,
    NoTangent,
    OutsideFreeSpace,
    SpmapError,
    Unreachable,
)

__all__ = [
    "Config",
    "DEFAULT_CONFIG",
    "SpmapError",
    "InvalidScene",
    "InvalidInput",
    "GeometryError",
    "NoTangent",
    "NoIntersection",
    "Unreachable",
    "OutsideFreeSpace",
    "AssemblyError",
    "DegeneracyWarning",
]

__version__ = "0.1.0"
