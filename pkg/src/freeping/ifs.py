"""Two-map affine contraction systems on the real line, computed exactly.

Scalars are ``Fraction`` or :class:`NumberFieldScalar` (a real algebraic
number given by a minimal polynomial and an isolating interval).  A word
``(i1, ..., in)`` denotes ``alpha_{i1} o ... o alpha_{in}``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from . import SCHEMA, _poly
from .errors import BudgetExceeded

Word = tuple[int, ...]

DEFAULT_MAX_WORDS = 1 << 20


# ---------------------------------------------------------------------------
# real number fields Q(theta)


def _iv_mul(a, b):
    prods = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(prods), max(prods)


def _iv_poly(coeffs, lo, hi):
    """Exact interval Horner evaluation of a low-to-high polynomial."""
    acc = (Fraction(0), Fraction(0))
    for c in reversed(coeffs):
        m = _iv_mul(acc, (lo, hi))
        acc = (m[0] + c, m[1] + c)
    return acc


class NumberField:
    """``Q[x]/(min_poly)`` embedded in R via the root in ``interval``.

    ``min_poly`` is a low-to-high integer list.  If it factors over Q the
    irreducible factor vanishing inside the interval is used instead, and
    ``chosen_factor`` records that.  The isolating interval is refined in
    place by bisection when signs need resolving.
    """

    def __init__(self, min_poly: Sequence[int], interval: tuple):
        poly = _poly.primitive_int([Fraction(c) for c in min_poly])
        if len(poly) < 2:
            raise ValueError("minimal polynomial must have degree >= 1")
        lo, hi = Fraction(interval[0]), Fraction(interval[1])
        if not lo < hi:
            raise ValueError("isolating interval must have lo < hi")
        self.given_poly = tuple(poly)
        poly = _factor_with_root(poly, lo, hi)
        self.chosen_factor = tuple(poly) != self.given_poly
        self.min_poly = tuple(poly)
        self._q = [Fraction(c) for c in poly]
        self.degree = len(poly) - 1
        if _count_roots(self._q, lo, hi) != 1:
            raise ValueError("interval must contain exactly one root of min_poly")
        # a root sitting on an endpoint collapses the interval to that point
        if self._sign_at(hi) == 0:
            lo = hi
        elif self._sign_at(lo) == 0:
            hi = lo
        self.lo, self.hi = lo, hi
        self.initial_interval = (lo, hi)

    def _sign_at(self, x) -> int:
        v = _poly.peval(self._q, x)
        return (v > 0) - (v < 0)

    def refine(self) -> None:
        """Halve the isolating interval."""
        if self.lo == self.hi:
            return
        mid = (self.lo + self.hi) / 2
        s = self._sign_at(mid)
        if s == 0:
            self.lo = self.hi = mid
        elif s == self._sign_at(self.lo):
            self.lo = mid
        else:
            self.hi = mid

    def refine_to(self, width: Fraction) -> None:
        while self.hi - self.lo > width:
            self.refine()

    @property
    def generator(self) -> "NumberFieldScalar":
        if self.degree == 1:
            return NumberFieldScalar(self, [-self._q[0] / self._q[1]])
        return NumberFieldScalar(self, [Fraction(0), Fraction(1)])

    def __call__(self, value) -> "NumberFieldScalar":
        if isinstance(value, NumberFieldScalar):
            if value.field is not self:
                raise ValueError("scalars belong to different fields")
            return value
        return NumberFieldScalar(self, [Fraction(value)])

    def to_json(self) -> dict:
        return {"min_poly": [str(c) for c in self.min_poly],
                "interval": [str(self.initial_interval[0]), str(self.initial_interval[1])]}


def _count_roots(q, lo, hi) -> int:
    """Distinct real roots in ``(lo, hi]`` by a Sturm sequence."""
    q = _poly.ptrim(q)
    seq = [q, _poly.pderiv(q)]
    while seq[-1] and len(seq[-1]) > 1:
        r = _poly.pdivmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append(_poly.pneg(r))

    def changes(x):
        signs = [s for s in ((v > 0) - (v < 0) for v in (_poly.peval(p, x) for p in seq)) if s]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    return changes(lo) - changes(hi)


def _factor_with_root(poly: list[int], lo: Fraction, hi: Fraction) -> list[int]:
    from sympy import Poly, symbols

    x = symbols("x")
    _, factors = Poly(list(reversed(poly)), x).factor_list()
    if len(factors) == 1 and factors[0][1] == 1:
        return poly
    for fac, _mult in factors:
        coeffs = [int(c) for c in reversed(fac.all_coeffs())]
        q = [Fraction(c) for c in coeffs]
        if _count_roots(q, lo, hi) >= 1:
            return _poly.primitive_int(q)
    raise ValueError("no factor of min_poly has a root in the interval")


class NumberFieldScalar:
    """An element ``repr(theta)`` of a real number field, ``deg repr < deg min_poly``."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs: Sequence):
        self.field = field
        poly = [Fraction(c) for c in coeffs]
        if len(poly) > field.degree:
            poly = _poly.pdivmod(poly, field._q)[1]
        self.coeffs = tuple(_poly.ptrim(poly))

    def _coerce(self, other):
        if isinstance(other, NumberFieldScalar):
            if other.field is not self.field:
                raise ValueError("scalars belong to different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return NumberFieldScalar(self.field, [Fraction(other)])
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return NumberFieldScalar(self.field, _poly.padd(list(self.coeffs), list(o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return NumberFieldScalar(self.field, _poly.pneg(list(self.coeffs)))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return NumberFieldScalar(self.field, _poly.pmul(list(self.coeffs), list(o.coeffs)))

    __rmul__ = __mul__

    def inverse(self) -> "NumberFieldScalar":
        if not self.coeffs:
            raise ZeroDivisionError("inverse of zero")
        g, s, _ = _poly.pxgcd(list(self.coeffs), self.field._q)
        if len(g) != 1:
            raise ZeroDivisionError("element is a zero divisor")
        return NumberFieldScalar(self.field, s)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** -n
        out = NumberFieldScalar(self.field, [Fraction(1)])
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.coeffs == o.coeffs

    def __hash__(self):
        if len(self.coeffs) <= 1:
            return hash(self.coeffs[0] if self.coeffs else Fraction(0))
        return hash(self.coeffs)

    def enclosure(self) -> tuple[Fraction, Fraction]:
        """Rational bounds from the current isolating interval."""
        return _iv_poly(list(self.coeffs), self.field.lo, self.field.hi)

    def sign(self) -> int:
        if not self.coeffs:
            return 0
        while True:
            lo, hi = self.enclosure()
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            self.field.refine()

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def approx(self, width: Fraction = Fraction(1, 1 << 60)) -> Fraction:
        """A rational within ``width`` of the value."""
        while True:
            lo, hi = self.enclosure()
            if hi - lo <= width:
                return (lo + hi) / 2
            self.field.refine()

    def __float__(self):
        return float(self.approx())

    def __repr__(self):
        terms = " + ".join(f"({c})*x^{i}" for i, c in enumerate(self.coeffs) if c) or "0"
        return f"NumberFieldScalar({terms} mod {list(self.field.min_poly)})"

    def to_json(self) -> dict:
        return {"field": self.field.to_json(), "repr": [str(c) for c in self.coeffs]}


Scalar = Union[Fraction, NumberFieldScalar]


def scalar_str(x: Scalar, digits: int = 20) -> str:
    """Exact text for rationals; a decimal approximation for field elements."""
    if isinstance(x, NumberFieldScalar):
        return f"{float(x.approx(Fraction(1, 10**digits))):.17g}"
    return str(Fraction(x))


def _exact(x) -> Scalar:
    if isinstance(x, NumberFieldScalar):
        return x
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


# ---------------------------------------------------------------------------
# affine systems


@dataclass(frozen=True)
class AffineContraction:
    """``x -> c*x + t`` with ``|c| < 1``."""

    c: Scalar
    t: Scalar

    def __post_init__(self):
        object.__setattr__(self, "c", _exact(self.c))
        object.__setattr__(self, "t", _exact(self.t))
        if not abs(self.c) < 1:
            raise ValueError("contraction ratio must satisfy |c| < 1")

    def __call__(self, x):
        return self.c * x + self.t

    def then_apply(self, outer: "AffineContraction") -> "AffineContraction":
        """``outer o self``."""
        return AffineContraction(outer.c * self.c, outer.c * self.t + outer.t)

    def key(self):
        return (self.c, self.t)


def fixed_point(alpha: AffineContraction) -> Scalar:
    return alpha.t / (1 - alpha.c)


@dataclass(frozen=True)
class IFSSystem:
    alpha1: AffineContraction
    alpha2: AffineContraction

    def __post_init__(self):
        for a in (self.alpha1, self.alpha2):
            if not (0 < a.c < 1):
                raise ValueError("both ratios must lie in (0, 1)")

    @classmethod
    def from_params(cls, c1, t1, c2, t2) -> "IFSSystem":
        return cls(AffineContraction(c1, t1), AffineContraction(c2, t2))

    @property
    def maps(self) -> tuple[AffineContraction, AffineContraction]:
        return (self.alpha1, self.alpha2)

    @property
    def fixed_points(self) -> tuple[Scalar, Scalar]:
        return fixed_point(self.alpha1), fixed_point(self.alpha2)

    def hull(self) -> tuple[Scalar, Scalar]:
        """Interval spanned by the fixed points.

        Positive ratios below 1 pull every point toward the fixed point, so
        both maps send this interval into itself and it contains the attractor.
        """
        p, q = self.fixed_points
        return (p, q) if p <= q else (q, p)

    def compose_word(self, word: Word) -> AffineContraction:
        out = None
        for i in reversed(word):
            a = self.maps[i - 1]
            out = a if out is None else out.then_apply(a)
        if out is None:
            raise ValueError("empty word")
        return out

    def to_json(self) -> dict:
        return {"alpha1": {"c": scalar_str(self.alpha1.c), "t": scalar_str(self.alpha1.t)},
                "alpha2": {"c": scalar_str(self.alpha2.c), "t": scalar_str(self.alpha2.t)}}


@dataclass
class AttractorApprox:
    """Level-``n`` cylinders ``w(hull)`` for every word of length ``n``.

    ``cylinders`` is in lexicographic word order; the parent of a word is
    the word with its last letter removed.
    """

    level: int
    hull: tuple[Scalar, Scalar]
    cylinders: list[tuple[Word, Scalar, Scalar]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["word", "lo", "hi"])
        for word, lo, hi in self.cylinders:
            writer.writerow(["".join(map(str, word)), scalar_str(lo), scalar_str(hi)])
        return buf.getvalue()


def _word_maps(system: IFSSystem, n: int, max_words: int) -> list[tuple[Word, AffineContraction]]:
    if n < 0:
        raise ValueError("level must be non-negative")
    if 2**n > max_words:
        raise BudgetExceeded(f"level {n} needs 2^{n} cylinders (> {max_words})",
                             partial=None, level=n)
    level: list[tuple[Word, AffineContraction | None]] = [((), None)]
    for _ in range(n):
        nxt = []
        for word, m in level:
            for j, a in enumerate(system.maps, start=1):
                # w o alpha_j keeps the cylinder inside the parent w(hull)
                nxt.append((word + (j,), a if m is None else a.then_apply(m)))
        level = nxt
    return level


def attractor(system: IFSSystem, n: int, *, max_words: int = DEFAULT_MAX_WORDS) -> AttractorApprox:
    lo, hi = system.hull()
    cyl = []
    for word, m in _word_maps(system, n, max_words):
        if m is None:
            cyl.append((word, lo, hi))
        else:
            cyl.append((word, m(lo), m(hi)))
    return AttractorApprox(n, (lo, hi), cyl)


def cover_sum(system: IFSSystem, n: int, *, max_words: int = DEFAULT_MAX_WORDS) -> Scalar:
    """Total length of the level-``n`` cylinders."""
    total = Fraction(0)
    for _, lo, hi in attractor(system, n, max_words=max_words).cylinders:
        total = (hi - lo) + total
    return total


def gap_delta(system: IFSSystem, n: int = 1, *, max_words: int = DEFAULT_MAX_WORDS
              ) -> Scalar | None:
    """Distance between the level-``n`` cylinders under ``alpha1`` and under ``alpha2``.

    None when the two families touch or overlap.
    """
    cyl = attractor(system, max(n, 1), max_words=max_words).cylinders
    items = sorted(((lo, hi, word[0]) for word, lo, hi in cyl), key=lambda c: c[0])
    reach: dict[int, Scalar] = {}
    best = None
    for lo, hi, side in items:
        other = reach.get(3 - side)
        if other is not None:
            d = lo - other
            if best is None or d < best:
                best = d
        if side not in reach or hi > reach[side]:
            reach[side] = hi
    if best is None or best <= 0:
        return None
    return best


@dataclass(frozen=True)
class HausdorffBounds:
    lower: Scalar
    upper: Scalar


def hausdorff_bounds(system: IFSSystem, n: int, *, max_words: int = DEFAULT_MAX_WORDS
                     ) -> HausdorffBounds:
    """Rigorous bounds on the one-dimensional Hausdorff measure of the attractor.

    When the two level-1 images cover the hull (``c1 + c2 >= 1``) the
    attractor is the whole hull and the measure equals its length.
    Otherwise the lower bound is 0 and the level-``n`` cylinders give the
    upper bound.
    """
    lo, hi = system.hull()
    diam = hi - lo
    s = system.alpha1.c + system.alpha2.c
    if s >= 1:
        return HausdorffBounds(diam, diam)
    return HausdorffBounds(Fraction(0), cover_sum(system, n, max_words=max_words))


# ---------------------------------------------------------------------------
# relations


@dataclass(frozen=True)
class AffineRelation:
    """Two distinct words composing to the same affine map ``x -> c*x + t``."""

    word1: Word
    word2: Word
    c: Scalar
    t: Scalar

    def verify(self, system: IFSSystem) -> bool:
        a = system.compose_word(self.word1)
        b = system.compose_word(self.word2)
        return self.word1 != self.word2 and a.key() == b.key() == (self.c, self.t)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "kind": "affine_relation",
                "word1": list(self.word1), "word2": list(self.word2),
                "c": scalar_str(self.c), "t": scalar_str(self.t)}


def relation_search(system: IFSSystem, L: int, *, max_words: int = DEFAULT_MAX_WORDS
                    ) -> list[AffineRelation]:
    """Every word of length ``<= L`` that repeats an earlier map, paired with
    the shortlex-least word giving that map.

    All words are expanded, so every coincidence is reported.
    """
    if 2 ** (L + 1) - 2 > max_words:
        raise BudgetExceeded(f"length {L} needs {2 ** (L + 1) - 2} words (> {max_words})",
                             partial=None, level=L)
    seen: dict = {}
    out = []
    level = [((j,), a) for j, a in enumerate(system.maps, start=1)]
    for k in range(1, L + 1):
        for word, m in level:
            key = m.key()
            first = seen.get(key)
            if first is None:
                seen[key] = word
            else:
                out.append(AffineRelation(first, word, m.c, m.t))
        if k < L:
            level = [((j,) + word, m.then_apply(a))
                     for j, a in enumerate(system.maps, start=1) for word, m in level]
    return out


@dataclass
class SharpnessResult:
    system: IFSSystem
    relation: AffineRelation
    interval: tuple[Fraction, Fraction]
    shortest_free_length: int

    def to_json(self) -> dict:
        field = self.system.alpha1.c.field
        return {"schema": SCHEMA, "field": field.to_json(),
                "interval": [str(self.interval[0]), str(self.interval[1])],
                "approx": scalar_str(self.system.alpha1.c),
                "relation": self.relation.to_json(),
                "no_relation_up_to_length": self.shortest_free_length}


def sharpness_polynomial(n: int) -> list[int]:
    """``x + x^2 + ... + x^n - 1``, low to high."""
    return [-1] + [1] * n


def sharpness_family(n: int, *, width_bits: int = 50) -> SharpnessResult:
    """The system ``c x, c x + 1`` with ``c + ... + c^n = 1``, ``c`` in ``(1/2, 1)``.

    Its ratios sum past 1, its fixed points differ, and
    ``alpha1 alpha2^n = alpha2 alpha1^n`` holds.  The relation is checked in
    exact field arithmetic and shorter words are searched to show none collide.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    q = [Fraction(v) for v in sharpness_polynomial(n)]
    lo, hi = Fraction(1, 2), Fraction(1)
    # the polynomial is increasing on (0, 1) with a negative value at 1/2
    while hi - lo > Fraction(1, 1 << width_bits) or lo == Fraction(1, 2):
        mid = (lo + hi) / 2
        if _poly.peval(q, mid) < 0:
            lo = mid
        else:
            hi = mid
    field = NumberField(sharpness_polynomial(n), (lo, hi))
    c = field.generator
    system = IFSSystem(AffineContraction(c, field(0)), AffineContraction(c, field(1)))
    w1 = (1,) + (2,) * n
    w2 = (2,) + (1,) * n
    m = system.compose_word(w1)
    rel = AffineRelation(w1, w2, m.c, m.t)
    if not rel.verify(system):
        raise ArithmeticError(f"relation failed to verify for n={n}")
    if relation_search(system, n):
        raise ArithmeticError(f"unexpected relation of length <= {n}")
    return SharpnessResult(system, rel, (lo, hi), n)
