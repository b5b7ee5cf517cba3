"""Exception hierarchy.

Every error carries a stable ``code`` (the class name) so the CLI can
report it verbatim, and the offending entity where there is one.
"""

from __future__ import annotations


class GppError(Exception):
    """Base class for all library errors."""

    exit_code = 2

    def __init__(self, message: str, entity: object = None):
        super().__init__(message)
        self.entity = entity

    @property
    def code(self) -> str:
        return type(self).__name__


class CycleDetected(GppError):
    pass


class DimensionMismatch(GppError):
    pass


class UnreachableTarget(GppError):
    pass


class DanglingEdge(GppError):
    pass


class InvalidPath(GppError):
    pass


class InvalidWeight(GppError):
    pass


class NonAffineWeight(GppError):
    pass


class NoFeasiblePath(GppError):
    pass


class ZeroLiquidation(GppError):
    pass


class ShapeViolation(GppError):
    pass


class EmptySet(GppError):
    pass


class NonPositiveElement(GppError):
    pass


class TooManyPaths(GppError):
    """Path enumeration would exceed the configured cap."""

    exit_code = 3

    def __init__(self, cap: int):
        super().__init__(f"more than {cap} source-target paths", cap)
        self.cap = cap
