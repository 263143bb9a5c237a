"""Exact polynomial helpers shared by the map, height and IFS code.

Two representations live here:

* binary forms with integer coefficients, stored high-to-low in ``X``:
  ``[c0, ..., cd]`` means ``sum(ci * X**(d-i) * Y**i)``;
* univariate polynomials over ``Fraction``, stored low-to-high:
  ``[a0, a1, ...]`` means ``sum(ai * x**i)``, trailing zeros stripped.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

# below this many output coefficients schoolbook multiplication wins
_KRONECKER_MIN = 48


def content(coeffs: Sequence[int]) -> int:
    g = 0
    for c in coeffs:
        g = gcd(g, c)
        if g == 1:
            break
    return g


def _schoolbook(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pack(coeffs: Sequence[int], nbytes: int) -> int:
    pos = b"".join((c if c > 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    neg = b"".join((-c if c < 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _kronecker(a: Sequence[int], b: Sequence[int]) -> list[int]:
    ma, mb = max(abs(c) for c in a), max(abs(c) for c in b)
    # each slot must hold both the inputs and every output coefficient
    bound = max(ma * mb * min(len(a), len(b)), ma, mb)
    nbytes = (bound.bit_length() + 2 + 7) // 8
    n = len(a) + len(b) - 1
    half = 1 << (8 * nbytes - 1)
    offset = int.from_bytes(half.to_bytes(nbytes, "little") * n, "little")
    raw = (_pack(a, nbytes) * _pack(b, nbytes) + offset).to_bytes(n * nbytes, "little")
    return [
        int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half
        for i in range(n)
    ]


def form_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Product of two binary forms (coefficient convolution)."""
    if len(a) + len(b) - 1 < _KRONECKER_MIN or not any(a) or not any(b):
        return _schoolbook(a, b)
    return _kronecker(a, b)


def form_powers(a: Sequence[int], n: int) -> list[list[int]]:
    """``[a**0, a**1, ..., a**n]`` as binary forms."""
    out = [[1], list(a)]
    for _ in range(n - 1):
        out.append(form_mul(out[-1], a))
    return out[: n + 1]


def form_eval(coeffs: Sequence[int], x: int, y: int) -> int:
    """Evaluate a binary form at the integer pair ``(x, y)`` exactly."""
    # homogeneous Horner: acc = acc*x + c*y^i
    acc = 0
    ypow = 1
    d = len(coeffs) - 1
    ys = [1] * (d + 1)
    for i in range(1, d + 1):
        ypow *= y
        ys[i] = ypow
    xpow = 1
    for i in range(d, -1, -1):
        c = coeffs[i]
        if c:
            acc += c * xpow * ys[i]
        xpow *= x
    return acc


def form_evals_mod(coeffs: Sequence[int], points: Sequence[int], p: int) -> list[int]:
    """Values ``F(x, 1) mod p`` at each sample point; sparse forms use modular powers."""
    reduced = [c % p for c in coeffs]
    d = len(reduced) - 1
    nonzero = [(d - i, c) for i, c in enumerate(reduced) if c]
    if 4 * len(nonzero) < len(reduced):
        return [sum(c * pow(x, e, p) for e, c in nonzero) % p for x in points]
    out = []
    for x in points:
        acc = 0
        for c in reduced:
            acc = (acc * x + c) % p
        out.append(acc)
    return out


def sylvester(f: Sequence[int], g: Sequence[int]) -> list[list[int]]:
    """Sylvester matrix of two binary forms of degrees len-1."""
    d, e = len(f) - 1, len(g) - 1
    n = d + e
    rows = []
    for i in range(e):
        rows.append([0] * i + list(f) + [0] * (n - d - 1 - i))
    for i in range(d):
        rows.append([0] * i + list(g) + [0] * (n - e - 1 - i))
    return rows


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Fraction-free Gaussian elimination; exact for integer matrices."""
    m = [list(r) for r in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            row_i, mik = m[i], m[i][k]
            row_k = m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def solve_exact(matrix: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[Fraction]:
    """Solve a nonsingular integer system over the rationals."""
    n = len(matrix)
    m = [[Fraction(v) for v in row] + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
    for k in range(n):
        piv = next(i for i in range(k, n) if m[i][k] != 0)
        m[k], m[piv] = m[piv], m[k]
        inv = 1 / m[k][k]
        row_k = [v * inv for v in m[k]]
        m[k] = row_k
        for i in range(n):
            if i != k and m[i][k] != 0:
                factor = m[i][k]
                m[i] = [vi - factor * vk for vi, vk in zip(m[i], row_k)]
    return [m[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# univariate polynomials over Q, low-to-high


def ptrim(p: Sequence[Fraction]) -> list[Fraction]:
    out = list(p)
    while out and out[-1] == 0:
        out.pop()
    return out


def padd(a, b):
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def pneg(a):
    return [-c for c in a]


def psub(a, b):
    return padd(a, pneg(b))


def pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return ptrim(out)


def pscale(a, s):
    return ptrim([c * s for c in a])


def pdivmod(a, b):
    a, b = ptrim(a), ptrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = [Fraction(c) for c in a]
    lead = Fraction(b[-1])
    while len(r) >= len(b):
        coef = r[-1] / lead
        shift = len(r) - len(b)
        q[shift] = coef
        for i, c in enumerate(b):
            r[shift + i] -= coef * c
        r = ptrim(r)
    return ptrim(q), r


def pmonic(a):
    a = ptrim(a)
    if not a:
        return a
    lead = Fraction(a[-1])
    return [Fraction(c) / lead for c in a]


def pgcd(a, b):
    """Monic gcd over the rationals."""
    a, b = ptrim(a), ptrim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return pmonic(a)


def pxgcd(a, b):
    """Return ``(g, s, t)`` with ``s*a + t*b = g`` and ``g`` monic."""
    r0, r1 = ptrim(a), ptrim(b)
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        q, r = pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, psub(s0, pmul(q, s1))
        t0, t1 = t1, psub(t0, pmul(q, t1))
    if not r0:
        return [], s0, t0
    lead = Fraction(r0[-1])
    return pmonic(r0), pscale(s0, 1 / lead), pscale(t0, 1 / lead)


def peval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def pderiv(a):
    return ptrim([i * a[i] for i in range(1, len(a))])


def primitive_int(a: Sequence[Fraction]) -> list[int]:
    """Clear denominators and content; leading coefficient made positive."""
    a = ptrim(a)
    if not a:
        return []
    den = 1
    for c in a:
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in a]
    g = content(ints)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints
