"""Weil heights, explicit functoriality constants, canonical heights and a
terminating preperiodicity test for maps of P^1 over Q.

For a coprime integer point the Weil height is ``log max(|a|, |b|)``.  For a
map of degree ``d`` the defect ``h(f(x)) - d*h(x)`` lies in
``[-c_minus, c_plus]``; the canonical height is the fixed point of
``h -> h(f(.)) / d`` and is enclosed by the usual geometric tail bound.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

from . import _interval, _poly
from .errors import DegenerateMap, IterationCapExceeded
from .projective import ProjPoint, RationalMap, evaluate, resultant

DEFAULT_MAX_ITERATIONS = 200
DEFAULT_EXACT_BITS = 4096
DEFAULT_ORBIT_CAP = 10**6
_PRECISIONS = (128, 256, 512, 1024, 2048, 4096)


@dataclass(frozen=True)
class HeightValue:
    magnitude: int
    log_value: float


def naive_height(p: ProjPoint) -> HeightValue:
    m = p.magnitude
    return HeightValue(m, 0.0 if m == 1 else _interval.log_nearest(m))


@dataclass(frozen=True)
class FunctorialityBound:
    """``d*h(x) - c_minus <= h(f(x)) <= d*h(x) + c_plus`` for all x in P^1(Q).

    ``plus_arg`` and ``minus_arg`` are the exact integers whose logarithms
    give ``c_plus`` and ``c_minus``; the floats are rounded upward.
    """

    c_plus: float
    c_minus: float
    c: float
    plus_arg: int
    minus_arg: int
    resultant: int
    cofactors: tuple[tuple[int, ...], ...] = field(repr=False)


def _cofactors(f: RationalMap, res: int) -> tuple[tuple[int, ...], ...]:
    """Forms p, q, r, s of degree d-1 with pF+qG = Res*X^(2d-1), rF+sG = Res*Y^(2d-1)."""
    d = f.degree
    n = 2 * d
    cols = []
    for form in (f.F, f.G):
        for j in range(d):
            col = [0] * n
            for i, c in enumerate(form):
                col[i + j] = c
            cols.append(col)
    matrix = [[cols[j][i] for j in range(n)] for i in range(n)]
    out = []
    for target in (0, n - 1):
        rhs = [0] * n
        rhs[target] = res
        sol = _poly.solve_exact(matrix, rhs)
        if any(x.denominator != 1 for x in sol):
            raise ArithmeticError("non-integral Sylvester cofactor")
        ints = [int(x) for x in sol]
        out.extend([tuple(ints[:d]), tuple(ints[d:])])
    return tuple(out)


@lru_cache(maxsize=512)
def functoriality_constants(f: RationalMap) -> FunctorialityBound:
    """Explicit constants from coefficient size and Sylvester cofactors.

    Upper: a form of degree d has d+1 monomials, so
    ``max(|F|,|G|) <= (d+1) H m^d`` and cancellation only lowers the height.
    Lower: the cofactor identities give ``|Res| m^(2d-1) <= 2 d H' m^(d-1) max(|F|,|G|)``
    while the coordinate gcd divides Res.
    """
    res = resultant(f)
    if res == 0:
        raise DegenerateMap("Res(F, G) = 0")
    d = f.degree
    cof = _cofactors(f, res)
    h_cof = max(max(abs(c) for c in form) for form in cof)
    plus_arg = (d + 1) * f.height_bound
    minus_arg = 2 * d * h_cof
    c_plus = _interval.log_upper(plus_arg)
    c_minus = _interval.log_upper(minus_arg)
    return FunctorialityBound(c_plus, c_minus, max(c_plus, c_minus), plus_arg, minus_arg, res, cof)


# ---------------------------------------------------------------------------
# canonical height


@dataclass(frozen=True)
class CanonicalHeightEstimate:
    lower: float
    upper: float
    n: int
    value_at_n: float

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "n": self.n,
                "value_at_n": self.value_at_n}


def _iv_form(ctx, coeffs, u, v):
    d = len(coeffs) - 1
    upow = [ctx.mpf(1)]
    vpow = [ctx.mpf(1)]
    for _ in range(d):
        upow.append(upow[-1] * u)
        vpow.append(vpow[-1] * v)
    acc = ctx.mpf(0)
    for i, c in enumerate(coeffs):
        if c:
            acc += c * upow[d - i] * vpow[i]
    return acc


def _scaled_values(f: RationalMap, p: ProjPoint, bound: FunctorialityBound, prec: int,
                   max_iterations: int, exact_bits: int):
    """Yield ``(n, I_n)`` with ``I_n`` an interval containing ``d^-n h(f^n p)``.

    The orbit is followed exactly while coordinates stay below ``exact_bits``.
    Past that, the real point is carried as an interval and the gcd that
    cancels at each step, a divisor of Res, is read off residues modulo a
    power of |Res|, so big integers never appear.
    """
    ctx = _interval.context(prec)
    d = f.degree
    P = p
    k = 0
    while True:
        m = P.magnitude
        value = ctx.log(ctx.mpf(m)) / ctx.mpf(d**k) if m > 1 else ctx.mpf(0)
        yield k, value
        if k >= max_iterations or m.bit_length() > exact_bits:
            break
        P = evaluate(f, P)
        k += 1
    if k >= max_iterations:
        return

    R = abs(bound.resultant)
    steps = max_iterations - k
    modulus = R ** (steps + 1) if R > 1 else 1
    ra, rb = (P.a % modulus, P.b % modulus) if R > 1 else (0, 0)
    arch_lo = (_interval.log_nearest(R) if R > 1 else 0.0) - bound.c_minus
    arch_lo = float(arch_lo) - 1e-12 * (1 + abs(arch_lo))
    arch_hi = bound.c_plus
    shift = max(m.bit_length() - 64, 0)
    u = ctx.mpf(P.a) / ctx.mpf(2) ** shift
    v = ctx.mpf(P.b) / ctx.mpf(2) ** shift
    while k < max_iterations:
        Fu = _iv_form(ctx, f.F, u, v)
        Gu = _iv_form(ctx, f.G, u, v)
        m_u = _interval.abs_max(ctx, u, v)
        m_F = _interval.abs_max(ctx, Fu, Gu)
        arch = ctx.log(m_F) - d * ctx.log(m_u)
        arch = _interval.intersect(ctx, arch, arch_lo, arch_hi)
        term = arch
        if R > 1:
            Fr = _poly.form_eval(f.F, ra, rb) % modulus
            Gr = _poly.form_eval(f.G, ra, rb) % modulus
            g = gcd(gcd(Fr, Gr), R)
            modulus //= R
            ra, rb = (Fr // g) % modulus, (Gr // g) % modulus
            if g > 1:
                term = term - ctx.log(ctx.mpf(g))
        value = value + term / ctx.mpf(d) ** (k + 1)
        k += 1
        yield k, value
        scale = _interval.upper_mpf(m_F)
        u, v = Fu / scale, Gu / scale


def _tail(ctx, bound: FunctorialityBound, d: int, n: int):
    denom = ctx.mpf(d) ** n * (d - 1)
    return ctx.mpf(bound.c_minus) / denom, ctx.mpf(bound.c_plus) / denom


def _enclosures(f, p, bound, prec, max_iterations, exact_bits):
    """Yield nested enclosures ``(n, lower, upper, value_interval)`` of the canonical height."""
    ctx = _interval.context(prec)
    d = f.degree
    lo_best = hi_best = None
    for n, value in _scaled_values(f, p, bound, prec, max_iterations, exact_bits):
        t_minus, t_plus = _tail(ctx, bound, d, n)
        lo = _interval.lower(value - t_minus)
        hi = _interval.upper(value + t_plus)
        # intersect with earlier enclosures: keeps refinement monotone
        if lo_best is not None:
            lo, hi = max(lo, lo_best), min(hi, hi_best)
        lo_best, hi_best = lo, hi
        yield n, lo, hi, value


def canonical_height(f: RationalMap, p: ProjPoint, tol: float = 1e-9, *,
                     max_iterations: int = DEFAULT_MAX_ITERATIONS,
                     exact_bits: int = DEFAULT_EXACT_BITS) -> CanonicalHeightEstimate:
    """Rigorous enclosure of the canonical height of ``p`` under ``f``.

    Stops at the smallest ``n`` with ``C / (d^n (d-1)) <= tol`` (continuing
    while rounding keeps the width above ``2*tol``).  Raises
    IterationCapExceeded, with the partial estimate, if ``max_iterations``
    is reached first.
    """
    d = f.degree
    if d < 2:
        raise ValueError("canonical heights need degree >= 2")
    if not tol > 0:
        raise ValueError("tol must be positive")
    bound = functoriality_constants(f)
    n_stop = 0
    while bound.c / (d**n_stop * (d - 1)) > tol:
        n_stop += 1

    last = None
    for prec in _PRECISIONS:
        for n, lo, hi, value in _enclosures(f, p, bound, prec, max_iterations, exact_bits):
            mid = min(max(_interval.midpoint(value), lo), hi)
            last = CanonicalHeightEstimate(lo, hi, n, mid)
            if n >= n_stop and hi - lo <= 2 * tol:
                return last
            # rounding noise dominates: retry at higher precision
            if n >= n_stop + 8:
                break
        else:
            break
    raise IterationCapExceeded(
        f"enclosure width {last.width:.3g} > 2*tol after {last.n} iterations", partial=last)


# ---------------------------------------------------------------------------
# preperiodicity


class Verdict(str, enum.Enum):
    PREPERIODIC = "Preperiodic"
    WANDERING = "Wandering"


@dataclass(frozen=True)
class Escape:
    """The orbit point at index ``n`` has magnitude ``M`` with ``M^(d-1) > minus_arg``."""

    n: int
    point: ProjPoint
    magnitude: int
    threshold: int

    def to_json(self) -> dict:
        return {"n": self.n, "height": repr(_interval.log_nearest(self.magnitude)),
                "magnitude": str(self.magnitude), "point": self.point.to_json(),
                "threshold": str(self.threshold)}

    @classmethod
    def from_json(cls, obj: dict) -> "Escape":
        return cls(int(obj["n"]), ProjPoint.from_json(obj["point"]), int(obj["magnitude"]),
                   int(obj["threshold"]))


@dataclass(frozen=True)
class PreperiodicityVerdict:
    verdict: Verdict
    tail: int | None = None
    cycle: tuple[ProjPoint, ...] | None = None
    escape: Escape | None = None

    def __post_init__(self):
        if (self.verdict is Verdict.PREPERIODIC) != (self.cycle is not None) or \
                (self.cycle is None) == (self.escape is None):
            raise ValueError("exactly one of cycle / escape must match the verdict")

    @property
    def is_preperiodic(self) -> bool:
        return self.verdict is Verdict.PREPERIODIC

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "tail": self.tail,
            "cycle": None if self.cycle is None else [q.to_json() for q in self.cycle],
            "escape": None if self.escape is None else self.escape.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PreperiodicityVerdict":
        verdict = Verdict(obj["verdict"])
        cycle = obj.get("cycle")
        esc = obj.get("escape")
        return cls(verdict,
                   tail=None if obj.get("tail") is None else int(obj["tail"]),
                   cycle=None if cycle is None else tuple(ProjPoint.from_json(c) for c in cycle),
                   escape=None if esc is None else Escape.from_json(esc))


def escapes(f: RationalMap, p: ProjPoint) -> bool:
    """True when ``h(p) > c_minus/(d-1)``, which forces heights to grow forever."""
    return p.magnitude ** (f.degree - 1) > functoriality_constants(f).minus_arg


def height_ceiling(f: RationalMap) -> int:
    """Largest magnitude a non-escaping rational point can have."""
    K = functoriality_constants(f).minus_arg
    e = f.degree - 1
    t = int(round(K ** (1.0 / e)))
    while t**e > K:
        t -= 1
    while (t + 1) ** e <= K:
        t += 1
    return t


def is_preperiodic(f: RationalMap, p: ProjPoint, *, orbit_cap: int = DEFAULT_ORBIT_CAP
                   ) -> PreperiodicityVerdict:
    """Decide whether ``p`` is preperiodic for ``f``; always terminates.

    Orbit points whose height exceeds ``c_minus/(d-1)`` escape; all others
    belong to a finite set, so the orbit either escapes or repeats.
    """
    d = f.degree
    if d < 2:
        raise ValueError("preperiodicity test needs degree >= 2")
    K = functoriality_constants(f).minus_arg
    T = height_ceiling(f)
    # pigeonhole: at most this many points of magnitude <= T
    cap = min(orbit_cap, (2 * T + 1) * (T + 1) + 2)
    seen: dict[ProjPoint, int] = {}
    orbit: list[ProjPoint] = []
    P = p
    for n in range(cap + 1):
        if P in seen:
            start = seen[P]
            return PreperiodicityVerdict(Verdict.PREPERIODIC, tail=start, cycle=tuple(orbit[start:]))
        if P.magnitude ** (d - 1) > K:
            return PreperiodicityVerdict(Verdict.WANDERING, escape=Escape(n, P, P.magnitude, K))
        seen[P] = n
        orbit.append(P)
        P = evaluate(f, P)
    raise IterationCapExceeded(f"orbit exceeded {cap} points without cycling or escaping")


def replay_verdict(f: RationalMap, p: ProjPoint, verdict: PreperiodicityVerdict) -> bool:
    """Check a verdict's certificate from scratch."""
    if verdict.is_preperiodic:
        cycle = verdict.cycle
        if not cycle or verdict.tail is None or verdict.tail < 0:
            return False
        P = p
        for _ in range(verdict.tail):
            P = evaluate(f, P)
        if P != cycle[0]:
            return False
        for i, q in enumerate(cycle):
            if evaluate(f, q) != cycle[(i + 1) % len(cycle)]:
                return False
        return True
    esc = verdict.escape
    P = p
    for _ in range(esc.n):
        P = evaluate(f, P)
    K = functoriality_constants(f).minus_arg
    return P == esc.point and P.magnitude == esc.magnitude and \
        esc.threshold == K and P.magnitude ** (f.degree - 1) > K
