"""Exact semigroup balls, entropy estimates and the diameter of independence."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

from . import SCHEMA
from .certifier import (CertifyBudget, IndependenceCertificate, RelationCertificate,
                        certify_independence)
from .enumeration import MapIndex, Word, iterate_levels, shortlex_key
from .errors import BudgetExceeded
from .projective import FingerprintConfig, RationalMap

DEFAULT_DIGIT_BUDGET = 10**6


@dataclass
class Ball:
    """``F u F^2 u ... u F^n`` with one shortlex-least word per distinct map.

    ``sizes[k-1]`` is the cumulative count through ``F^k``.
    """

    n: int
    elements: list[tuple[RationalMap, Word]]
    sizes: list[int]
    relations: list[RelationCertificate] = field(default_factory=list)


def enumerate_ball(F: Sequence[RationalMap], n: int, *,
                   config: FingerprintConfig | None = FingerprintConfig(),
                   workers: int = 1, digit_budget: int | None = DEFAULT_DIGIT_BUDGET) -> Ball:
    """Enumerate the ball of radius ``n`` exactly.

    ``config=None`` switches the deduplication to plain coefficient
    comparison.  On BudgetExceeded the partial ball is attached as
    ``exc.partial`` and the offending level as ``exc.level``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    gens = tuple(F)
    index = MapIndex(config)
    elements: list[tuple[RationalMap, Word]] = []
    sizes: list[int] = []
    relations: list[RelationCertificate] = []
    try:
        for level in iterate_levels(gens, n, config=config, workers=workers,
                                    digit_budget=digit_budget):
            for w1, w2, m in level.collisions:
                relations.append(RelationCertificate(gens, w1, w2, m))
            fresh = []
            for word, m in level.entries:
                digest = level.digests.get(word)
                earlier = index.get(m, digest)
                if earlier is None:
                    fresh.append((word, m, digest))
                else:
                    relations.append(RelationCertificate(gens, earlier, word, m))
            for word, m, digest in fresh:
                index.add(m, word, digest)
                elements.append((m, word))
            sizes.append(len(elements))
    except BudgetExceeded as exc:
        exc.partial = Ball(len(sizes), elements, sizes, relations)
        raise
    return Ball(n, elements, sizes, relations)


def entropy_estimates(ball: Ball) -> list[float]:
    """``(1/k) log sizes[k]`` for each radius; never a claimed limit."""
    return [math.log(s) / k for k, s in enumerate(ball.sizes, start=1)]


@dataclass
class DeltaResult:
    """``delta`` is the certified value, or None meaning ``Delta(F) > searched``
    could not be excluded within budget."""

    delta: int | None
    searched: int
    independent_pair: tuple[Word, Word, IndependenceCertificate] | None
    relations: list[RelationCertificate] = field(default_factory=list)

    def to_json(self) -> dict:
        pair = None
        if self.independent_pair is not None:
            w1, w2, cert = self.independent_pair
            pair = {"word1": list(w1), "word2": list(w2), "certificate": cert.to_json()}
        return {"schema": SCHEMA, "delta": self.delta, "searched": self.searched,
                "independent_pair": pair,
                "relations": [r.to_json() for r in self.relations]}


def compute_delta(F: Sequence[RationalMap], n_max: int,
                  budget: CertifyBudget = CertifyBudget(), *, ball: Ball | None = None,
                  workers: int = 1) -> DeltaResult:
    """Smallest ``k <= n_max`` with a certified independent pair in the ball.

    Only maps of degree >= 2 take part.  At radius ``k`` only pairs with an
    element first reached at length ``k`` are new; within a radius, pairs are
    ordered by the shortlex rank of the later element, then the earlier one.
    """
    if ball is None or ball.n < n_max:
        ball = enumerate_ball(F, n_max, workers=workers)
    gens = tuple(F)
    cands = [(m, w) for m, w in sorted(ball.elements, key=lambda e: shortlex_key(e[1]))
             if m.degree >= 2 and len(w) <= n_max]
    relations: list[RelationCertificate] = []
    for k in range(1, n_max + 1):
        for j, (mj, wj) in enumerate(cands):
            if len(wj) != k:
                continue
            for mi, wi in cands[:j]:
                result = certify_independence(mi, mj, budget)
                if isinstance(result, IndependenceCertificate):
                    return DeltaResult(k, k, (wi, wj, result), relations)
                if isinstance(result, RelationCertificate):
                    lifted = _lift_relation(gens, wi, wj, result)
                    # commuting powers of one word lift to the same word
                    if lifted.word1 != lifted.word2:
                        relations.append(lifted)
    return DeltaResult(None, n_max, None, relations)


def _lift_relation(gens, wi: Word, wj: Word, rel: RelationCertificate) -> RelationCertificate:
    """Rewrite a relation between two ball elements as one over the generators."""
    subs = {1: wi, 2: wj}

    def expand(word):
        return tuple(i for letter in word for i in subs[letter])

    return RelationCertificate(gens, expand(rel.word1), expand(rel.word2), rel.composed)


@dataclass
class GrowthReport:
    sizes: list[int]
    entropy_estimates: list[float]
    delta: int | None = None
    relations: list[RelationCertificate] = field(default_factory=list)
    independent_pair: tuple[Word, Word, IndependenceCertificate] | None = None

    def to_json(self, config: dict | None = None) -> dict:
        pair = None
        if self.independent_pair is not None:
            w1, w2, cert = self.independent_pair
            pair = {"word1": list(w1), "word2": list(w2), "certificate": cert.to_json()}
        out = {"schema": SCHEMA}
        if config is not None:
            out["config"] = config
        out.update({
            "sizes": self.sizes,
            "entropy_estimates": self.entropy_estimates,
            "delta": self.delta,
            "independent_pair": pair,
            "relations": [r.to_json() for r in self.relations],
        })
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "size", "entropy_estimate"])
        for k, (s, e) in enumerate(zip(self.sizes, self.entropy_estimates), start=1):
            writer.writerow([k, s, repr(e)])
        return buf.getvalue()


def growth_report(F: Sequence[RationalMap], n: int, *, delta_n_max: int = 0,
                  budget: CertifyBudget = CertifyBudget(),
                  config: FingerprintConfig | None = FingerprintConfig(),
                  workers: int = 1, digit_budget: int | None = DEFAULT_DIGIT_BUDGET
                  ) -> GrowthReport:
    """Ball sizes and entropy estimates up to ``n``; with ``delta_n_max > 0``
    also search for an independent pair in the ball of that radius."""
    ball = enumerate_ball(F, n, config=config, workers=workers, digit_budget=digit_budget)
    report = GrowthReport(ball.sizes, entropy_estimates(ball), relations=list(ball.relations))
    if delta_n_max:
        res = compute_delta(F, min(delta_n_max, n), budget, ball=ball)
        report.delta = res.delta
        report.independent_pair = res.independent_pair
    return report


def check_growth_bound(report: GrowthReport) -> bool:
    """``sizes[m*delta] >= 2^m`` for every radius the report covers.

    An independent pair in the radius-``delta`` ball gives ``2^m`` distinct
    products of ``m`` pair elements, all inside the radius-``m*delta`` ball.
    Vacuously true when delta is unknown.
    """
    if report.delta is None:
        return True
    d = report.delta
    return all(report.sizes[m * d - 1] >= 2**m for m in range(1, len(report.sizes) // d + 1))
