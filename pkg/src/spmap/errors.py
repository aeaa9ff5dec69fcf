"""Exception types shared across the package."""
from __future__ import annotations


class SpmapError(Exception):
    """Base class for all library errors."""


class InvalidScene(SpmapError):
    """Scene input violates a structural precondition (bad ring, overlap, source placement)."""


class InvalidInput(SpmapError):
    """Malformed input to a construction routine."""


class GeometryError(SpmapError):
    """A geometric primitive could not produce a meaningful answer."""


class NoTangent(GeometryError):
    """No tangent from the query point to the chain exists on the requested side."""


class NoIntersection(GeometryError):
    """The requested intersection point does not exist."""


class Unreachable(SpmapError):
    """The target is not reachable by the wavelet / in the free space."""


class OutsideFreeSpace(SpmapError):
    """Query point lies inside an obstacle or outside the mapped region."""


class AssemblyError(SpmapError):
    """Map assembly reached an inconsistent combinatorial state."""


class DegeneracyWarning(UserWarning):
    """Emitted when a degenerate configuration is resolved by epsilon-merging."""
