"""Freeness certificates for pairs of maps and the pair scan behind Delta <= 2.

Two maps of degree >= 2 whose preperiodic sets differ generate a free
semigroup of rank 2.  A certificate exhibits a rational point that is
preperiodic for one map (with its cycle) and escapes under the other (with
an explicit height escape).  When no rational witness exists within budget
the certifier looks for an exact word relation instead, and otherwise
reports Inconclusive.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from . import SCHEMA
from ._poly import form_eval
from .enumeration import MapIndex, Word, iterate_levels
from .errors import BudgetExceeded
from .heights import (Escape, PreperiodicityVerdict, Verdict, height_ceiling, is_preperiodic,
                      replay_verdict)
from .projective import (INFINITY, ProjPoint, RationalMap, compose, compose_word, identity,
                         map_equals, point)


@dataclass(frozen=True)
class CertifyBudget:
    max_period: int = 3
    preimage_depth: int = 3
    max_word_length: int = 8
    # largest degree d^k allowed when forming f^k for the period search
    degree_limit: int = 1 << 12
    # largest point magnitude searched for rational roots
    height_limit: int = 10**6
    # relation search stops before any level whose degree passes this
    relation_degree_limit: int = 1 << 12

    def to_json(self) -> dict:
        return dict(self.__dict__)


# ---------------------------------------------------------------------------
# rational preperiodic points


def rational_roots(coeffs: Sequence[int], max_magnitude: int) -> set[ProjPoint]:
    """Rational zeros ``(a:b)`` of a binary form with ``max(|a|, b) <= max_magnitude``.

    Candidates follow the rational root theorem: ``a`` divides the trailing
    coefficient, ``b`` the leading one.
    """
    if not any(coeffs):
        raise ValueError("the zero form has every point as a root")
    roots: set[ProjPoint] = set()
    cs = list(coeffs)
    if cs[0] == 0:
        roots.add(INFINITY)
    while cs[0] == 0:
        cs.pop(0)
    if cs[-1] == 0:
        roots.add(point(0))
        while cs[-1] == 0:
            cs.pop()
    if len(cs) == 1:
        return roots
    lead, const = abs(cs[0]), abs(cs[-1])
    nums = [a for a in range(1, min(max_magnitude, const) + 1) if const % a == 0]
    dens = [b for b in range(1, min(max_magnitude, lead) + 1) if lead % b == 0]
    for a in nums:
        for b in dens:
            if gcd(a, b) != 1:
                continue
            for s in (a, -a):
                if form_eval(cs, s, b) == 0:
                    roots.add(point(s, b))
    return roots


def _fixed_point_form(g: RationalMap) -> list[int]:
    # X*G(X,Y) - Y*F(X,Y), degree D+1
    D = g.degree
    out = [0] * (D + 2)
    for i in range(D + 1):
        out[i] += g.G[i]
        out[i + 1] -= g.F[i]
    return out


def rational_preperiodic_points(f: RationalMap, max_period: int = 3, preimage_depth: int = 3,
                                budget: CertifyBudget = CertifyBudget()) -> frozenset[ProjPoint]:
    """Rational points on cycles of length <= max_period, closed under
    rational preimages ``preimage_depth`` times.

    Every preperiodic rational point has magnitude at most
    :func:`height_ceiling`, which bounds the root search.
    """
    d = f.degree
    if d < 2:
        raise ValueError("need degree >= 2")
    if d**max_period > budget.degree_limit:
        raise BudgetExceeded(f"degree {d}^{max_period} exceeds {budget.degree_limit}")
    T = height_ceiling(f)
    if T > budget.height_limit:
        raise BudgetExceeded(f"height ceiling {T} exceeds {budget.height_limit}")
    pts: set[ProjPoint] = set()
    g = f
    for k in range(1, max_period + 1):
        if k > 1:
            g = compose(f, g)
        pts |= rational_roots(_fixed_point_form(g), T)
    frontier = set(pts)
    for _ in range(preimage_depth):
        new: set[ProjPoint] = set()
        for q in frontier:
            form = [q.b * x - q.a * y for x, y in zip(f.F, f.G)]
            new |= rational_roots(form, T)
        frontier = new - pts
        pts |= frontier
        if not frontier:
            break
    for q in pts:
        if not is_preperiodic(f, q).is_preperiodic:
            raise AssertionError(f"{q} was found as preperiodic but is not")
    return frozenset(pts)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class IndependenceCertificate:
    """``witness`` is preperiodic for map ``preperiodic_for`` and escapes under the other."""

    f1: RationalMap
    f2: RationalMap
    preperiodic_for: int
    witness: ProjPoint
    tail: int
    cycle: tuple[ProjPoint, ...]
    escape: Escape

    @property
    def periodic_map(self) -> RationalMap:
        return self.f1 if self.preperiodic_for == 1 else self.f2

    @property
    def wandering_map(self) -> RationalMap:
        return self.f2 if self.preperiodic_for == 1 else self.f1

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "independence",
            "f1": self.f1.to_json(),
            "f2": self.f2.to_json(),
            "preperiodic_for": self.preperiodic_for,
            "witness": self.witness.to_json(),
            "witness_cycle": {"tail": self.tail, "cycle": [q.to_json() for q in self.cycle]},
            "separation": {"type": "escape", **self.escape.to_json()},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "IndependenceCertificate":
        sep = obj["separation"]
        if sep.get("type") != "escape":
            raise ValueError(f"unsupported separation type {sep.get('type')!r}")
        return cls(
            RationalMap.from_json(obj["f1"]), RationalMap.from_json(obj["f2"]),
            int(obj["preperiodic_for"]), ProjPoint.from_json(obj["witness"]),
            int(obj["witness_cycle"]["tail"]),
            tuple(ProjPoint.from_json(q) for q in obj["witness_cycle"]["cycle"]),
            Escape.from_json(sep))

    def verify(self) -> bool:
        if self.f1.degree < 2 or self.f2.degree < 2 or self.preperiodic_for not in (1, 2):
            return False
        cyc = PreperiodicityVerdict(Verdict.PREPERIODIC, tail=self.tail, cycle=self.cycle)
        esc = PreperiodicityVerdict(Verdict.WANDERING, escape=self.escape)
        return replay_verdict(self.periodic_map, self.witness, cyc) and \
            replay_verdict(self.wandering_map, self.witness, esc)


@dataclass(frozen=True)
class RelationCertificate:
    """Two distinct words over ``generators`` composing to the same map."""

    generators: tuple[RationalMap, ...]
    word1: Word
    word2: Word
    composed: RationalMap

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "relation",
            "generators": [g.to_json() for g in self.generators],
            "word1": list(self.word1),
            "word2": list(self.word2),
            "composed": self.composed.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RelationCertificate":
        return cls(tuple(RationalMap.from_json(g) for g in obj["generators"]),
                   tuple(int(i) for i in obj["word1"]), tuple(int(i) for i in obj["word2"]),
                   RationalMap.from_json(obj["composed"]))

    def verify(self) -> bool:
        n = len(self.generators)
        if self.word1 == self.word2 or not self.word1 or not self.word2:
            return False
        if any(not 1 <= i <= n for i in self.word1 + self.word2):
            return False
        return map_equals(compose_word(self.generators, self.word1), self.composed) and \
            map_equals(compose_word(self.generators, self.word2), self.composed)


@dataclass(frozen=True)
class Inconclusive:
    witness_search: str
    relation_search: str

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "kind": "inconclusive",
                "witness_search": self.witness_search, "relation_search": self.relation_search}


def certificate_from_json(obj: dict):
    kind = obj.get("kind")
    if obj.get("schema") != SCHEMA:
        raise ValueError(f"unknown schema {obj.get('schema')!r}")
    if kind == "independence":
        return IndependenceCertificate.from_json(obj)
    if kind == "relation":
        return RelationCertificate.from_json(obj)
    raise ValueError(f"cannot verify certificate kind {kind!r}")


def verify_certificate(obj: dict) -> bool:
    """Replay a serialized certificate from scratch."""
    try:
        cert = certificate_from_json(obj)
    except (KeyError, ValueError, TypeError):
        return False
    return cert.verify()


# ---------------------------------------------------------------------------
# search


def find_relation(generators: Sequence[RationalMap], max_length: int,
                  degree_limit: int | None = None) -> tuple[RelationCertificate | None, int]:
    """Shortest relation among words of length <= max_length.

    At each length, collisions between words of that same length are
    preferred over collisions with shorter words.  Returns the certificate
    (or None) and the word length fully searched.
    """
    gens = tuple(generators)
    seen = MapIndex(config=None)
    searched = 0
    try:
        for level in iterate_levels(gens, max_length, config=None, degree_limit=degree_limit):
            if level.collisions:
                w1, w2, m = level.collisions[0]
                return RelationCertificate(gens, w1, w2, m), level.k
            for word, m in level.entries:
                digest = level.digests.get(word)
                earlier = seen.get(m, digest)
                if earlier is not None:
                    return RelationCertificate(gens, earlier, word, m), level.k
            for word, m in level.entries:
                seen.add(m, word, level.digests.get(word))
            searched = level.k
    except BudgetExceeded:
        pass
    return None, searched


def _witness_search(f1, f2, budget: CertifyBudget):
    notes = []
    for pre_idx, fa, fb in ((1, f1, f2), (2, f2, f1)):
        try:
            pts = rational_preperiodic_points(fa, budget.max_period, budget.preimage_depth, budget)
        except BudgetExceeded as exc:
            notes.append(f"f{pre_idx}: {exc}")
            continue
        for w in sorted(pts, key=ProjPoint.sort_key):
            verdict = is_preperiodic(fb, w)
            if not verdict.is_preperiodic:
                own = is_preperiodic(fa, w)
                return IndependenceCertificate(f1, f2, pre_idx, w, own.tail, own.cycle,
                                               verdict.escape), notes
        notes.append(f"f{pre_idx}: all {len(pts)} rational preperiodic points are "
                     f"preperiodic for f{3 - pre_idx}")
    return None, notes


def certify_independence(f1: RationalMap, f2: RationalMap, budget: CertifyBudget = CertifyBudget()):
    """IndependenceCertificate, RelationCertificate or Inconclusive for ``<f1, f2>``."""
    if f1.degree < 2 or f2.degree < 2:
        raise ValueError("both maps need degree >= 2")
    cert, notes = _witness_search(f1, f2, budget)
    if cert is not None:
        return cert
    rel, searched = find_relation((f1, f2), budget.max_word_length, budget.relation_degree_limit)
    if rel is not None:
        return rel
    return Inconclusive("; ".join(notes), f"no relation among words of length <= {searched}")


# ---------------------------------------------------------------------------
# pair scan


@dataclass
class ScanReport:
    """Outcome of the pair scan over ``F``.

    ``pair`` holds the 1-based indices ``(sigma, f, tau, g)`` into ``F``
    with 0 standing for the identity.
    """

    pair: tuple[int, int, int, int] | None
    elements: tuple[RationalMap, RationalMap] | None
    certificate: IndependenceCertificate | None
    relations: list[RelationCertificate] = field(default_factory=list)
    pairs_tested: int = 0

    @property
    def independent(self) -> bool:
        return self.certificate is not None

    @property
    def delta_bound(self) -> int | None:
        if self.pair is None:
            return None
        return 1 if self.pair[0] == 0 and self.pair[2] == 0 else 2

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "status": "independent" if self.independent else "inconclusive",
            "pair": None if self.pair is None else list(self.pair),
            "delta_bound": self.delta_bound,
            "elements": None if self.elements is None else [e.to_json() for e in self.elements],
            "certificate": None if self.certificate is None else self.certificate.to_json(),
            "relations": [r.to_json() for r in self.relations],
            "pairs_tested": self.pairs_tested,
        }


def _scan_pairs(F: Sequence[RationalMap]):
    F1 = [(i, m) for i, m in enumerate(F, start=1) if m.degree == 1]
    F2 = [(i, m) for i, m in enumerate(F, start=1) if m.degree >= 2]
    sigmas = [(0, identity())] + F1
    elems = {}
    for si, s in sigmas:
        for fi, f in F2:
            elems[si, fi] = f if si == 0 else compose(s, f)
    out = []
    for si, _ in sigmas:
        for fi, _ in F2:
            for ti, _ in sigmas:
                for gi, _ in F2:
                    a, b = elems[si, fi], elems[ti, gi]
                    if not map_equals(a, b):
                        out.append(((si, fi, ti, gi), a, b))
    return out


def _certify_pair(a, b, budget):
    return certify_independence(a, b, budget)


def scan_pairs_in_ball(F: Sequence[RationalMap], budget: CertifyBudget = CertifyBudget(),
                       workers: int = 1) -> ScanReport:
    """Certify some pair ``(sigma f, tau g)`` with sigma, tau of degree 1 or the
    identity and f, g of degree >= 2, scanning in shortlex order of indices.
    """
    pairs = _scan_pairs(F)
    relations: list[RelationCertificate] = []

    def finish(rank, result):
        idx, a, b = pairs[rank]
        return ScanReport(idx, (a, b), result, relations, rank + 1)

    if workers <= 1:
        for rank, (idx, a, b) in enumerate(pairs):
            result = certify_independence(a, b, budget)
            if isinstance(result, IndependenceCertificate):
                return finish(rank, result)
            if isinstance(result, RelationCertificate):
                relations.append(result)
        return ScanReport(None, None, None, relations, len(pairs))

    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_certify_pair, [a for _, a, _ in pairs],
                                [b for _, _, b in pairs], [budget] * len(pairs)))
    for rank, result in enumerate(results):
        if isinstance(result, IndependenceCertificate):
            return finish(rank, result)
        if isinstance(result, RelationCertificate):
            relations.append(result)
    return ScanReport(None, None, None, relations, len(pairs))
