"""Level-synchronous enumeration of semigroup words with exact deduplication.

A word ``(i1, ..., in)`` stands for ``f_{i1} o ... o f_{in}``.  Level ``k``
holds every distinct map of ``F^k`` together with the shortlex-least word of
length ``k`` realizing it.  Level ``k+1`` is built by composing each
generator on the left of each level-``k`` map; candidates are merged in
shortlex order, so the result does not depend on how the work was split.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import BudgetExceeded
from .projective import FingerprintConfig, MapFingerprint, RationalMap, compose, fingerprint

Word = tuple[int, ...]

_LOG10_2 = math.log10(2)


def shortlex_key(word: Word):
    return (len(word), word)


class MapIndex:
    """Map -> first word seen, keyed by fingerprint with exact confirmation.

    With ``config=None`` the canonical coefficient tuples are compared
    directly (the fully exact path).
    """

    def __init__(self, config: FingerprintConfig | None = FingerprintConfig()):
        self.config = config
        self._buckets: dict = {}
        self.collisions = 0

    def key(self, f: RationalMap, digest: MapFingerprint | None = None):
        if self.config is None:
            return f
        return digest if digest is not None else fingerprint(f, self.config)

    def get(self, f: RationalMap, digest: MapFingerprint | None = None) -> Word | None:
        for g, w in self._buckets.get(self.key(f, digest), ()):
            if g == f:
                return w
            self.collisions += 1
        return None

    def add(self, f: RationalMap, word: Word, digest: MapFingerprint | None = None) -> None:
        self._buckets.setdefault(self.key(f, digest), []).append((f, word))

    def __len__(self) -> int:
        return sum(len(b) for b in self._buckets.values())


@dataclass
class Level:
    k: int
    entries: list[tuple[Word, RationalMap]]
    # pairs of distinct length-k words composing to one map (least, next)
    collisions: list[tuple[Word, Word, RationalMap]] = field(default_factory=list)
    digests: dict = field(default_factory=dict, repr=False)

    @property
    def digits(self) -> int:
        return int(sum(m.coefficient_bits() for _, m in self.entries) * _LOG10_2)


def _expand(generators: Sequence[RationalMap], chunk: Sequence[tuple[Word, RationalMap]],
            config: FingerprintConfig | None):
    out = []
    for j, g in enumerate(generators, start=1):
        for word, m in chunk:
            new = compose(g, m)
            out.append(((j,) + word, new, fingerprint(new, config) if config else None))
    return out


def _split(items: list, parts: int) -> list[list]:
    size = max(1, math.ceil(len(items) / parts))
    return [items[i:i + size] for i in range(0, len(items), size)]


def _merge(k: int, candidates, config: FingerprintConfig | None) -> Level:
    candidates.sort(key=lambda c: c[0])
    index = MapIndex(config)
    entries: list[tuple[Word, RationalMap]] = []
    digests = {}
    collisions = []
    seen_collision: set[Word] = set()
    for word, m, digest in candidates:
        first = index.get(m, digest)
        if first is None:
            index.add(m, word, digest)
            entries.append((word, m))
            digests[word] = digest
        elif first not in seen_collision:
            seen_collision.add(first)
            collisions.append((first, word, m))
    return Level(k, entries, collisions, digests)


def iterate_levels(generators: Sequence[RationalMap], n: int, *,
                   config: FingerprintConfig | None = FingerprintConfig(),
                   workers: int = 1, digit_budget: int | None = None,
                   degree_limit: int | None = None) -> Iterator[Level]:
    """Yield levels ``1..n`` of the word tree over ``generators``.

    Raises BudgetExceeded (``level`` set, ``partial`` = last complete level)
    when a level's total coefficient size passes ``digit_budget`` decimal
    digits or its largest degree passes ``degree_limit``.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("empty generator list")
    level = _merge(1, [((j,), g, fingerprint(g, config) if config else None)
                       for j, g in enumerate(gens, start=1)], config)
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        k = 1
        prev = None
        while True:
            _check_budget(level, prev, digit_budget, degree_limit)
            yield level
            if k >= n:
                return
            k += 1
            if pool is None:
                candidates = _expand(gens, level.entries, config)
            else:
                chunks = _split(level.entries, workers * 4)
                candidates = []
                for part in pool.map(_expand, [gens] * len(chunks), chunks,
                                     [config] * len(chunks)):
                    candidates.extend(part)
            prev, level = level, _merge(k, candidates, config)
    finally:
        if pool is not None:
            pool.shutdown()


def _check_budget(level: Level, prev: Level | None, digit_budget, degree_limit):
    if digit_budget is not None and level.digits > digit_budget:
        raise BudgetExceeded(
            f"level {level.k} holds {level.digits} coefficient digits (> {digit_budget})",
            partial=prev, level=level.k)
    if degree_limit is not None and max(m.degree for _, m in level.entries) > degree_limit:
        raise BudgetExceeded(f"level {level.k} exceeds degree {degree_limit}",
                             partial=prev, level=level.k)
