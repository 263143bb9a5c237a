"""Ping-pong certificates, heights and growth for semigroups of rational maps."""

SCHEMA = "freeping/1"

from .errors import (BudgetExceeded, ConstantMap, DegenerateMap, FreepingError,  # noqa: E402
                     IterationCapExceeded, MapParseError)
from .projective import (INFINITY, FingerprintConfig, ProjPoint, RationalMap,  # noqa: E402
                         compose, evaluate, fingerprint, iterate, map_equals, normalize_map,
                         point, resultant)

__all__ = [
    "SCHEMA", "BudgetExceeded", "ConstantMap", "DegenerateMap", "FreepingError",
    "IterationCapExceeded", "MapParseError", "INFINITY", "FingerprintConfig", "ProjPoint",
    "RationalMap", "compose", "evaluate", "fingerprint", "iterate", "map_equals",
    "normalize_map", "point", "resultant",
]
