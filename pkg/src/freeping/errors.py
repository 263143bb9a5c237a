"""Exception types raised across the toolkit."""

from __future__ import annotations

from typing import Any


class FreepingError(Exception):
    """Base class for all toolkit errors."""


class DegenerateMap(FreepingError, ValueError):
    """The forms share a root: Res(F, G) = 0."""


class ConstantMap(FreepingError, ValueError):
    """A degree-0 map was requested."""


class MapParseError(FreepingError, ValueError):
    """A map or point specification could not be parsed."""


class IterationCapExceeded(FreepingError):
    """An iteration guard fired before the requested tolerance was met.

    ``partial`` carries whatever enclosure was available at that point.
    """

    def __init__(self, message: str, partial: Any = None):
        super().__init__(message)
        self.partial = partial


class BudgetExceeded(FreepingError):
    """A size budget (degree, word count, coefficient digits) was exhausted."""

    def __init__(self, message: str, partial: Any = None, level: int | None = None):
        super().__init__(message)
        self.partial = partial
        self.level = level
