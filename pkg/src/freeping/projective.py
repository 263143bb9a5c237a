"""Rational self-maps of the projective line over Q.

A map of degree ``d`` is a pair of binary forms ``F, G`` with integer
coefficients, ``z -> F(z, 1) / G(z, 1)``.  Coefficient ``i`` of a form is
the coefficient of ``X**(d-i) * Y**i``.  Maps are kept in a canonical form
(content 1, first nonzero coefficient of ``F + G`` positive) so equality is
structural and hashing is well defined.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

from . import _poly
from .errors import ConstantMap, DegenerateMap

MERSENNE_61 = (1 << 61) - 1


@dataclass(frozen=True, order=False)
class ProjPoint:
    """A point ``(a : b)`` of P^1(Q) in normalized coprime coordinates.

    Use :func:`point` to build one from arbitrary integers.
    """

    a: int
    b: int

    def __post_init__(self):
        if gcd(self.a, self.b) != 1 or self.b < 0 or (self.b == 0 and self.a != 1):
            raise ValueError(f"({self.a}:{self.b}) is not a normalized point")

    @property
    def is_infinity(self) -> bool:
        return self.b == 0

    @property
    def magnitude(self) -> int:
        return max(abs(self.a), self.b)

    def sort_key(self):
        # small height first, then smaller denominator, positive before negative
        return (self.magnitude, self.b, abs(self.a), self.a < 0)

    def as_fraction(self) -> Fraction | None:
        return None if self.b == 0 else Fraction(self.a, self.b)

    def __str__(self) -> str:
        if self.b == 0:
            return "inf"
        if self.b == 1:
            return str(self.a)
        return f"{self.a}/{self.b}"

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b)}

    @classmethod
    def from_json(cls, obj: dict) -> "ProjPoint":
        return point(int(obj["a"]), int(obj["b"]))


def point(a: int | Fraction, b: int = 1) -> ProjPoint:
    """Normalize ``(a : b)``; a ``Fraction`` may be passed as ``a``."""
    if isinstance(a, Fraction):
        a, b = a.numerator * b, a.denominator
    a, b = int(a), int(b)
    if a == 0 and b == 0:
        raise ValueError("(0:0) is not a projective point")
    g = gcd(a, b)
    a, b = a // g, b // g
    if b < 0 or (b == 0 and a < 0):
        a, b = -a, -b
    return ProjPoint(a, b)


INFINITY = ProjPoint(1, 0)


@dataclass(frozen=True)
class RationalMap:
    """A degree-``d`` endomorphism of P^1 over Q in canonical form.

    Instances are normally produced by :func:`normalize_map` or
    :func:`compose`; the constructor itself does not validate.
    """

    degree: int
    F: tuple[int, ...]
    G: tuple[int, ...]

    @cached_property
    def height_bound(self) -> int:
        """Largest absolute coefficient of F and G."""
        return max(max(abs(c) for c in self.F), max(abs(c) for c in self.G))

    @property
    def is_polynomial(self) -> bool:
        return all(c == 0 for c in self.G[:-1]) and self.F[0] != 0

    def coefficient_bits(self) -> int:
        return sum(c.bit_length() for c in self.F) + sum(c.bit_length() for c in self.G)

    def __call__(self, p: ProjPoint) -> ProjPoint:
        return evaluate(self, p)

    def __str__(self) -> str:
        num = _format_poly(self.F)
        if self.is_polynomial and self.G[-1] == 1:
            return num
        return f"({num})/({_format_poly(self.G)})"

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "F": [str(c) for c in self.F],
            "G": [str(c) for c in self.G],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RationalMap":
        m = normalize_map([int(c) for c in obj["F"]], [int(c) for c in obj["G"]])
        if "degree" in obj and int(obj["degree"]) != m.degree:
            raise ValueError("degree field disagrees with coefficient lists")
        return m


def _format_poly(coeffs: Sequence[int]) -> str:
    d = len(coeffs) - 1
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        e = d - i
        mag = abs(c)
        if e == 0:
            body = str(mag)
        else:
            body = ("" if mag == 1 else f"{mag}*") + ("z" if e == 1 else f"z^{e}")
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    sign, body = terms[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def _canonical(F: list[int], G: list[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    g = _poly.content(F + G)
    F = [c // g for c in F]
    G = [c // g for c in G]
    first = next(c for c in F + G if c)
    if first < 0:
        F = [-c for c in F]
        G = [-c for c in G]
    return tuple(F), tuple(G)


def normalize_map(rawF: Sequence[int], rawG: Sequence[int]) -> RationalMap:
    """Validate a pair of coefficient lists and return its canonical map.

    Raises ConstantMap for lists of length 1 and DegenerateMap when the
    forms have a common root.
    """
    if len(rawF) != len(rawG):
        raise ValueError("F and G must have the same length d+1")
    if len(rawF) < 2:
        raise ConstantMap("degree-0 maps are constant")
    F = [int(c) for c in rawF]
    G = [int(c) for c in rawG]
    if not any(F) and not any(G):
        raise DegenerateMap("both forms are zero")
    if _poly.bareiss_det(_poly.sylvester(F, G)) == 0:
        raise DegenerateMap("Res(F, G) = 0: the forms share a root")
    F, G = _canonical(F, G)
    return RationalMap(len(F) - 1, F, G)


def identity() -> RationalMap:
    return RationalMap(1, (1, 0), (0, 1))


def resultant(f: RationalMap) -> int:
    """Res(F, G) as the Sylvester determinant, exact."""
    return _poly.bareiss_det(_poly.sylvester(f.F, f.G))


def evaluate(f: RationalMap, p: ProjPoint) -> ProjPoint:
    return point(_poly.form_eval(f.F, p.a, p.b), _poly.form_eval(f.G, p.a, p.b))


def compose(f: RationalMap, g: RationalMap) -> RationalMap:
    """Canonical form of ``f o g`` (``g`` applied first)."""
    d = f.degree
    need_f = [d - i for i, c in enumerate(f.F) if c] + [d - i for i, c in enumerate(f.G) if c]
    need_g = [i for i, c in enumerate(f.F) if c] + [i for i, c in enumerate(f.G) if c]
    pf = _powers(g.F, max(need_f))
    pg = _powers(g.G, max(need_g))
    D = d * g.degree
    outF = [0] * (D + 1)
    outG = [0] * (D + 1)
    for i in range(d + 1):
        cf, cg = f.F[i], f.G[i]
        if not cf and not cg:
            continue
        term = _poly.form_mul(pf[d - i], pg[i])
        for k, t in enumerate(term):
            if t:
                if cf:
                    outF[k] += cf * t
                if cg:
                    outG[k] += cg * t
    F, G = _canonical(outF, outG)
    return RationalMap(D, F, G)


def _powers(form: Sequence[int], n: int) -> list[list[int]]:
    return _poly.form_powers(form, n) if n >= 1 else [[1]]


def compose_word(generators: Sequence[RationalMap], word: Iterable[int]) -> RationalMap:
    """Compose ``f_{i1} o ... o f_{in}`` for a 1-based index word."""
    word = list(word)
    if not word:
        raise ValueError("empty word")
    out = generators[word[-1] - 1]
    for i in reversed(word[:-1]):
        out = compose(generators[i - 1], out)
    return out


def iterate(f: RationalMap, p: ProjPoint, n: int) -> list[ProjPoint]:
    """The orbit segment ``p, f(p), ..., f^n(p)``."""
    out = [p]
    for _ in range(n):
        out.append(evaluate(f, out[-1]))
    return out


def map_equals(f: RationalMap, g: RationalMap) -> bool:
    return f.degree == g.degree and f.F == g.F and f.G == g.G


# ---------------------------------------------------------------------------
# fingerprints


@dataclass(frozen=True)
class FingerprintConfig:
    """Prime and sample-point rule for map fingerprints.

    With ``seed == 0`` a degree-``d`` map is sampled at ``0, 1, ..., 2d``;
    any other seed draws ``2d + 1`` distinct points in ``[0, prime)``.
    """

    prime: int = MERSENNE_61
    seed: int = 0

    def points(self, degree: int) -> tuple[int, ...]:
        n = 2 * degree + 1
        if self.seed == 0:
            return tuple(range(n))
        return tuple(random.Random(self.seed * 1_000_003 + degree).sample(range(self.prime), n))


@dataclass(frozen=True)
class MapFingerprint:
    prime: int
    digest: tuple[int, ...]


def fingerprint(f: RationalMap, config: FingerprintConfig = FingerprintConfig()) -> MapFingerprint:
    """Reduce the canonical forms modulo ``config.prime`` at sample points.

    Equal maps always share a fingerprint; unequal maps collide only when
    their coefficients agree modulo the prime at every sample point.
    """
    p = config.prime
    pts = config.points(f.degree)
    fv = _poly.form_evals_mod(f.F, pts, p)
    gv = _poly.form_evals_mod(f.G, pts, p)
    digest = (f.degree,) + tuple(v for pair in zip(fv, gv) for v in pair)
    return MapFingerprint(p, digest)
